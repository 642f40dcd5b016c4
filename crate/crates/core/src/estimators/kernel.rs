//! Single-element evaluation of estimator matrices and their squares.
//!
//! Every matrix here depends on a cell pair `(i, j)` only through the product
//! index `i ^ j`. None of these functions allocate anything of size `2^n`
//! except [`squared_element_general`], so the linear and weighted AA paths
//! work at `n` in the tens of thousands.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::estimators::config::{check_waak, EstimatorConfig, MixtureComponent};
use crate::estimators::shrinkage::Term;
use crate::estimators::ShrinkageSpec;
use crate::transforms::{self, ln_cosh_pair, Transform};
use crate::walsh::CellIndex;

pub(crate) fn check_pair(i: &CellIndex, j: &CellIndex, dim: usize) -> Result<()> {
    if i.dim() != dim {
        return Err(Error::dim_mismatch(dim, i.dim()));
    }
    if j.dim() != dim {
        return Err(Error::dim_mismatch(dim, j.dim()));
    }
    Ok(())
}

/// `sum_k b_k W[k, i ^ j]` over the given terms.
#[inline]
pub(crate) fn signed_sum(terms: &[Term], i: &CellIndex, j: &CellIndex) -> f64 {
    terms.iter().map(|t| t.value * t.sign(i, j)).sum()
}

/// `x / Z` with `Z` given as a logarithm.
#[inline]
pub(crate) fn divide_ln(x: f64, ln_z: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * (x.abs().ln() - ln_z).exp()
    }
}

/// `x / 2^n`, exact whenever `2^-n` is a normal float.
#[inline]
pub(crate) fn div_pow2(x: f64, n: usize) -> f64 {
    if n <= 1022 {
        x * f64::from_bits(((1023 - n) as u64) << 52)
    } else {
        divide_ln(x, n as f64 * LN_2)
    }
}

/// The Kronecker-structured kernel `prod_d [[g^w_d, g^-w_d], [g^-w_d, g^w_d]] / Z`.
///
/// Valid for any `gamma > 0`; the weighted AA kernel is the case `gamma >= 1`.
#[derive(Debug, Clone)]
pub(crate) struct ProductKernel {
    /// `w_d ln(gamma)` per dimension.
    exps: Vec<f64>,
    exp_total: f64,
    ln_z: f64,
    /// `ln(g^(2w) + g^(-2w)) - ln 2` per dimension.
    sq_excess: Vec<f64>,
    sq_agree_total: f64,
}

impl ProductKernel {
    pub fn new(weights: &[f64], gamma: f64) -> Self {
        let lg = gamma.ln();
        let exps: Vec<f64> = weights.iter().map(|w| w * lg).collect();
        let ln_z = exps.iter().map(|&u| ln_cosh_pair(u)).sum();
        let sq_agree: Vec<f64> = exps.iter().map(|&u| ln_cosh_pair(2.0 * u)).collect();
        Self {
            exp_total: exps.iter().sum(),
            ln_z,
            sq_agree_total: sq_agree.iter().sum(),
            sq_excess: sq_agree.iter().map(|a| a - LN_2).collect(),
            exps,
        }
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    /// `ln Q[i, j]`; each disagreement flips `+w ln g` to `-w ln g`.
    #[inline]
    pub fn ln_element(&self, i: &CellIndex, j: &CellIndex) -> f64 {
        let mut flipped = 0.0;
        i.for_each_disagreement(j, |d| flipped += self.exps[d]);
        self.exp_total - 2.0 * flipped - self.ln_z
    }

    /// `ln Q^2[i, j]`: factor `g^(2w) + g^(-2w)` on agreement, `2` otherwise.
    #[inline]
    pub fn ln_squared(&self, i: &CellIndex, j: &CellIndex) -> f64 {
        let mut excess = 0.0;
        i.for_each_disagreement(j, |d| excess += self.sq_excess[d]);
        self.sq_agree_total - excess - 2.0 * self.ln_z
    }

    /// `ln (Q_self Q_other)[i, j]` for two product kernels.
    pub fn ln_cross(&self, other: &ProductKernel, i: &CellIndex, j: &CellIndex) -> f64 {
        let mut acc = 0.0;
        for (d, (&u, &v)) in self.exps.iter().zip(&other.exps).enumerate() {
            acc += if i.bit(d) == j.bit(d) {
                ln_cosh_pair(u + v)
            } else {
                ln_cosh_pair(u - v)
            };
        }
        acc - self.ln_z - other.ln_z
    }

    /// Eigenvalue on Walsh coefficient `k` (given by its variable bits):
    /// `prod_{d in k} tanh(w_d ln g)`.
    pub fn spectral(&self, bits: &[usize]) -> f64 {
        bits.iter().map(|&d| self.exps[d].tanh()).product()
    }

    /// Dense first row `Q[1, m]`. Needs `n <= 30`.
    pub fn dense_row(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        Error::check_dense("dense kernel row", n)?;
        let mut row = vec![0.0; 1 << n];
        row[0] = (self.exp_total - self.ln_z).exp();
        // each new bit flips one more dimension of an already filled entry
        for d in 0..n {
            let factor = (-2.0 * self.exps[d]).exp();
            let half = 1 << d;
            for m in 0..half {
                row[m + half] = row[m] * factor;
            }
        }
        Ok(row)
    }
}

fn check_waak_domain(weights: &[f64], gamma: f64) -> Result<()> {
    check_waak(weights, gamma).map_err(|e| match e {
        Error::Config(msg) => Error::Domain(msg),
        other => other,
    })
}

/// `[(1 / 2^n) W diag(b) W]_{ij}` in `O(nonzeros(b))`.
pub fn element_linear(i: &CellIndex, j: &CellIndex, b: &ShrinkageSpec) -> Result<f64> {
    b.validate_linear()?;
    let n = b.dim()?;
    check_pair(i, j, n)?;
    Ok(div_pow2(signed_sum(&b.linear_terms(), i, j), n))
}

/// `[((1 / 2^n) W diag(b) W)^2]_{ij} = (1 / 2^n) sum_k b_k^2 W[k, i ^ j]`.
pub fn squared_element_linear(i: &CellIndex, j: &CellIndex, b: &ShrinkageSpec) -> Result<f64> {
    b.validate_linear()?;
    let n = b.dim()?;
    check_pair(i, j, n)?;
    let s: f64 = b.linear_terms().iter().map(|t| t.value * t.value * t.sign(i, j)).sum();
    Ok(div_pow2(s, n))
}

/// `f([W diag(b) W]_{ij}) / Z` with the numerator in `O(nonzeros(b))`.
///
/// Exponential numerators are formed in the log domain, so the closed-form
/// exponential regime never overflows.
pub fn element_transformed(i: &CellIndex, j: &CellIndex, b: &ShrinkageSpec, t: &Transform) -> Result<f64> {
    let z = transforms::normalizer(t, b)?;
    let n = b.dim()?;
    check_pair(i, j, n)?;
    let s = signed_sum(&b.terms(), i, j);
    match t {
        Transform::Exponential { gamma } => Ok((s * gamma.ln() - z.ln_value).exp()),
        _ => Ok(divide_ln(t.apply(s)?, z.ln_value)),
    }
}

/// Weighted Aitchison-Aitken kernel element in `O(n)`.
pub fn element_waak(i: &CellIndex, j: &CellIndex, weights: &[f64], gamma: f64) -> Result<f64> {
    ln_element_waak(i, j, weights, gamma).map(f64::exp)
}

/// Natural log of [`element_waak`]; finite at any `n`.
pub fn ln_element_waak(i: &CellIndex, j: &CellIndex, weights: &[f64], gamma: f64) -> Result<f64> {
    check_waak_domain(weights, gamma)?;
    check_pair(i, j, weights.len())?;
    Ok(ProductKernel::new(weights, gamma).ln_element(i, j))
}

/// Element of the squared weighted AA kernel matrix in `O(n)`.
pub fn squared_element_waak(i: &CellIndex, j: &CellIndex, weights: &[f64], gamma: f64) -> Result<f64> {
    check_waak_domain(weights, gamma)?;
    check_pair(i, j, weights.len())?;
    Ok(ProductKernel::new(weights, gamma).ln_squared(i, j).exp())
}

/// Element of `Q^2` for an arbitrary transformed estimator.
///
/// Builds `v = f(W b)` in `O(n 2^n)` and then sums
/// `v[i ^ l] v[l ^ j] / Z^2` over all `l`.
pub fn squared_element_general(i: &CellIndex, j: &CellIndex, b: &ShrinkageSpec, t: &Transform) -> Result<f64> {
    let n = b.dim()?;
    Error::check_dense("general squared element", n)?;
    check_pair(i, j, n)?;
    let (v, z) = transforms::transformed_row(t, b)?;
    let a = i.zero_based_words()[0] as usize;
    let c = j.zero_based_words()[0] as usize;
    let s: f64 = (0..v.len()).map(|l| v[a ^ l] * v[l ^ c]).sum();
    Ok(s / (z.value * z.value))
}

/// Element of a single (non-mixture) config.
pub fn element_config(i: &CellIndex, j: &CellIndex, config: &EstimatorConfig) -> Result<f64> {
    match config {
        EstimatorConfig::Linear { shrinkage } => element_linear(i, j, shrinkage),
        EstimatorConfig::Transformed { shrinkage, transform } => element_transformed(i, j, shrinkage, transform),
        EstimatorConfig::Waak { .. } | EstimatorConfig::AaClassic { .. } => {
            config.validate()?;
            let (w, g) = config.as_waak().expect("waak-like config");
            element_waak(i, j, &w, g)
        }
        EstimatorConfig::Mixture { components } => element_mixture(i, j, components),
    }
}

/// `sum_m c_m Q_m[i, j]` with each component normalized on its own.
pub fn element_mixture(i: &CellIndex, j: &CellIndex, components: &[MixtureComponent]) -> Result<f64> {
    EstimatorConfig::Mixture {
        components: components.to_vec(),
    }
    .validate()?;
    let mut acc = 0.0;
    for c in components {
        acc += c.weight * element_config(i, j, &c.config)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(j: u64, n: usize) -> CellIndex {
        CellIndex::new(j, n).unwrap()
    }

    #[test]
    fn linear_degenerate_cases() {
        let n = 4;
        let uniform = ShrinkageSpec::uniform(n);
        let ones = ShrinkageSpec::ones(n).unwrap();
        for i in 1..=16 {
            for j in 1..=16 {
                let (a, b) = (cell(i, n), cell(j, n));
                assert_eq!(element_linear(&a, &b, &uniform).unwrap(), 1.0 / 16.0);
                let e = element_linear(&a, &b, &ones).unwrap();
                assert_eq!(e, if i == j { 1.0 } else { 0.0 });
                assert_eq!(squared_element_linear(&a, &b, &uniform).unwrap(), 1.0 / 16.0);
                assert_eq!(
                    squared_element_linear(&a, &b, &ones).unwrap(),
                    if i == j { 1.0 } else { 0.0 }
                );
            }
        }
    }

    #[test]
    fn waak_examples() {
        // one disagreement at n = 3, lambda = 0.8
        let w = vec![1.0; 3];
        let e = element_waak(&cell(1, 3), &cell(2, 3), &w, 2.0).unwrap();
        assert!((e - 0.128).abs() < 1e-15);
        let e = element_waak(&cell(3, 3), &cell(6, 3), &[0.2, 0.9, 0.4], 1.0).unwrap();
        assert!((e - 0.125).abs() < 1e-15);
        assert!(matches!(
            element_waak(&cell(1, 3), &cell(2, 3), &w, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(element_waak(&cell(1, 3), &cell(2, 4), &w, 2.0).is_err());
    }

    #[test]
    fn waak_squared_degenerate() {
        let n = 3;
        for i in 1..=8 {
            for j in 1..=8 {
                let a = squared_element_waak(&cell(i, n), &cell(j, n), &[0.3, 0.5, 0.9], 1.0).unwrap();
                let b = squared_element_waak(&cell(i, n), &cell(j, n), &[0.0; 3], 3.0).unwrap();
                assert!((a - 0.125).abs() < 1e-15);
                assert!((b - 0.125).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn transformed_reduces_to_linear() {
        let n = 3;
        let b = ShrinkageSpec::Dense {
            values: vec![1.0, 0.5, 0.2, 0.0, 0.9, 0.1, 0.3, 0.4],
        };
        for i in 1..=8 {
            for j in 1..=8 {
                let l = element_linear(&cell(i, n), &cell(j, n), &b).unwrap();
                let t = element_transformed(&cell(i, n), &cell(j, n), &b, &Transform::Identity).unwrap();
                assert!((l - t).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exponential_b_w_is_waak() {
        let n = 4;
        let w = vec![0.2, 0.7, 1.0, 0.4];
        let b = ShrinkageSpec::single_interaction(w.clone());
        let t = Transform::Exponential { gamma: 2.5 };
        for i in 1..=16 {
            for j in 1..=16 {
                let a = element_transformed(&cell(i, n), &cell(j, n), &b, &t).unwrap();
                let k = element_waak(&cell(i, n), &cell(j, n), &w, 2.5).unwrap();
                assert!((a - k).abs() <= 1e-14 * k);
            }
        }
    }

    #[test]
    fn dense_row_matches_elements() {
        let pk = ProductKernel::new(&[0.1, 0.5, 0.8, 1.0, 0.3], 1.7);
        let row = pk.dense_row().unwrap();
        let first = CellIndex::first(5);
        for m in 0..32u64 {
            let e = pk.ln_element(&first, &cell(m + 1, 5)).exp();
            assert!((row[m as usize] - e).abs() <= 1e-14 * e);
        }
    }

    #[test]
    fn huge_dimension_is_finite_in_log_domain() {
        let n = 10_000;
        let w: Vec<f64> = (0..n).map(|d| (d % 10) as f64 / 10.0).collect();
        let i = CellIndex::first(n);
        let j = CellIndex::from_vars(n, &[1, 500, 9_999]).unwrap();
        let ln = ln_element_waak(&i, &j, &w, 3.0).unwrap();
        assert!(ln.is_finite() && ln < 0.0);
    }
}
