use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::estimators::config::EstimatorConfig;
use crate::estimators::kernel::{check_pair, div_pow2, divide_ln, signed_sum, ProductKernel};
use crate::estimators::shrinkage::Term;
use crate::estimators::ShrinkageSpec;
use crate::transforms::{self, transformed_row, NormalizerMethod, NormalizerResult, Transform};
use crate::walsh::{fwht, xor_autocorrelation, CellIndex};

/// An estimator matrix `Q` compiled from a validated [`EstimatorConfig`].
///
/// Normalizers and any `2^n` tables are computed once here. Element
/// evaluation takes `&self` and is safe to call from many threads.
#[derive(Debug)]
pub struct Estimator {
    config: EstimatorConfig,
    dim: usize,
    kernel: Kernel,
    normalizers: Vec<NormalizerResult>,
    /// Lazily built first row of `Q^2` for the table-based paths.
    squared_row: OnceLock<std::result::Result<Arc<Vec<f64>>, Error>>,
}

#[derive(Debug)]
enum Kernel {
    /// Linear estimator with few coefficients; any `n`.
    LinearSparse {
        terms: Vec<Term>,
        dim: usize,
    },
    /// Linear estimator with a dense `b`: rows of `Q` and `Q^2`.
    LinearDense {
        row: Vec<f64>,
        squared_row: Vec<f64>,
    },
    /// Exponential transform of `b_w`, including both AA kernels.
    Product(ProductKernel),
    /// Transform of a signed sum with a closed-form normalizer.
    Signed {
        terms: Vec<Term>,
        transform: Transform,
        ln_z: f64,
    },
    /// Normalized first row `Q[1, m]`, from the general path.
    Table {
        row: Vec<f64>,
    },
    Mixture(Vec<(f64, Estimator)>),
}

#[inline]
fn table_index(i: &CellIndex, j: &CellIndex) -> usize {
    (i.zero_based_words()[0] ^ j.zero_based_words()[0]) as usize
}

impl Estimator {
    pub fn new(config: &EstimatorConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim()?;
        let (kernel, normalizers) = match config {
            EstimatorConfig::Linear { shrinkage } => Self::linear(shrinkage)?,
            EstimatorConfig::Transformed { shrinkage, transform } => Self::transformed(shrinkage, transform)?,
            EstimatorConfig::Waak { .. } | EstimatorConfig::AaClassic { .. } => {
                let (w, gamma) = config.as_waak().expect("waak-like config");
                Self::product(&w, gamma)
            }
            EstimatorConfig::Mixture { components } => {
                let parts = components
                    .iter()
                    .map(|c| Ok((c.weight, Estimator::new(&c.config)?)))
                    .collect::<Result<Vec<_>>>()?;
                let normalizers = parts.iter().flat_map(|(_, e)| e.normalizers.iter().copied()).collect();
                (Kernel::Mixture(parts), normalizers)
            }
        };
        Ok(Self {
            config: config.clone(),
            dim,
            kernel,
            normalizers,
            squared_row: OnceLock::new(),
        })
    }

    fn linear(b: &ShrinkageSpec) -> Result<(Kernel, Vec<NormalizerResult>)> {
        Self::linear_unit_first(&b.with_unit_first()?)
    }

    fn product(weights: &[f64], gamma: f64) -> (Kernel, Vec<NormalizerResult>) {
        let pk = ProductKernel::new(weights, gamma);
        let ln_z = pk.ln_z();
        let z = NormalizerResult {
            value: ln_z.exp(),
            ln_value: ln_z,
            method: NormalizerMethod::ClosedFormExponential,
        };
        (Kernel::Product(pk), vec![z])
    }

    fn transformed(b: &ShrinkageSpec, t: &Transform) -> Result<(Kernel, Vec<NormalizerResult>)> {
        match (t, b) {
            (Transform::Identity, _) if b.first_coefficient() == 1.0 => Self::linear_unit_first(b),
            (Transform::Exponential { gamma }, ShrinkageSpec::SingleInteraction { w }) => Ok(Self::product(w, *gamma)),
            (Transform::Logistic { .. }, ShrinkageSpec::SingleInteraction { .. }) => {
                let z = transforms::normalizer(t, b)?;
                Ok((
                    Kernel::Signed {
                        terms: b.terms(),
                        transform: *t,
                        ln_z: z.ln_value,
                    },
                    vec![z],
                ))
            }
            _ => {
                let (mut row, z) = transformed_row(t, b)?;
                row.iter_mut().for_each(|v| *v /= z.value);
                Ok((Kernel::Table { row }, vec![z]))
            }
        }
    }

    /// `b` must carry `b_1 = 1` explicitly; other entries are unrestricted.
    fn linear_unit_first(b: &ShrinkageSpec) -> Result<(Kernel, Vec<NormalizerResult>)> {
        let n = b.dim()?;
        let z = transforms::normalizer(&Transform::Identity, b)?;
        let kernel = match b {
            ShrinkageSpec::Dense { values } => {
                let scale = 1.0 / values.len() as f64;
                let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
                let mut row = fwht(values)?;
                let mut squared_row = fwht(&squares)?;
                row.iter_mut().for_each(|v| *v *= scale);
                squared_row.iter_mut().for_each(|v| *v *= scale);
                Kernel::LinearDense { row, squared_row }
            }
            _ => Kernel::LinearSparse {
                terms: b.terms(),
                dim: n,
            },
        };
        Ok((kernel, vec![z]))
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One normalizer per component (a single entry unless mixed).
    pub fn normalizers(&self) -> &[NormalizerResult] {
        &self.normalizers
    }

    /// True when every estimate is guaranteed nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        match &self.config {
            EstimatorConfig::Linear { .. } => false,
            EstimatorConfig::Transformed { transform, .. } => transform.is_nonnegative(),
            EstimatorConfig::Waak { .. } | EstimatorConfig::AaClassic { .. } => true,
            EstimatorConfig::Mixture { .. } => match &self.kernel {
                Kernel::Mixture(parts) => parts.iter().all(|(_, e)| e.is_nonnegative()),
                _ => unreachable!(),
            },
        }
    }

    /// `Q[i, j]`.
    pub fn element(&self, i: &CellIndex, j: &CellIndex) -> Result<f64> {
        check_pair(i, j, self.dim)?;
        Ok(self.element_unchecked(i, j))
    }

    pub(crate) fn element_unchecked(&self, i: &CellIndex, j: &CellIndex) -> f64 {
        match &self.kernel {
            Kernel::LinearSparse { terms, dim } => div_pow2(signed_sum(terms, i, j), *dim),
            Kernel::LinearDense { row, .. } | Kernel::Table { row } => row[table_index(i, j)],
            Kernel::Product(pk) => pk.ln_element(i, j).exp(),
            Kernel::Signed { terms, transform, ln_z } => {
                let f = transform
                    .apply(signed_sum(terms, i, j))
                    .expect("closed-form transforms accept finite input");
                divide_ln(f, *ln_z)
            }
            Kernel::Mixture(parts) => parts.iter().map(|(c, e)| c * e.element_unchecked(i, j)).sum(),
        }
    }

    /// `Q^2[i, j]`.
    ///
    /// Linear and product kernels (and mixtures of them) use closed forms at
    /// any `n`; every other case builds the first row of `Q^2` once through
    /// an XOR autocorrelation, which needs `n <= 30`.
    pub fn squared_element(&self, i: &CellIndex, j: &CellIndex) -> Result<f64> {
        check_pair(i, j, self.dim)?;
        match &self.kernel {
            Kernel::LinearSparse { terms, dim } => {
                let s: f64 = terms.iter().map(|t| t.value * t.value * t.sign(i, j)).sum();
                Ok(div_pow2(s, *dim))
            }
            Kernel::LinearDense { squared_row, .. } => Ok(squared_row[table_index(i, j)]),
            Kernel::Product(pk) => Ok(pk.ln_squared(i, j).exp()),
            Kernel::Mixture(parts) if parts.iter().all(|(_, e)| e.has_closed_cross()) => {
                let mut acc = 0.0;
                for (a, (ca, ea)) in parts.iter().enumerate() {
                    acc += ca * ca * ea.squared_element(i, j)?;
                    for (cb, eb) in &parts[a + 1..] {
                        acc += 2.0 * ca * cb * ea.cross_element(eb, i, j);
                    }
                }
                Ok(acc)
            }
            _ => {
                let row = self.squared_row()?;
                Ok(row[table_index(i, j)])
            }
        }
    }

    fn has_closed_cross(&self) -> bool {
        matches!(self.kernel, Kernel::LinearSparse { .. } | Kernel::Product(_))
    }

    /// `(Q_self Q_other)[i, j]` for sparse-linear and product kernels.
    fn cross_element(&self, other: &Estimator, i: &CellIndex, j: &CellIndex) -> f64 {
        match (&self.kernel, &other.kernel) {
            (Kernel::LinearSparse { terms, dim }, Kernel::LinearSparse { terms: other_terms, .. }) => {
                let lookup: HashMap<&[usize], f64> = other_terms.iter().map(|t| (t.bits.as_slice(), t.value)).collect();
                let s: f64 = terms
                    .iter()
                    .filter_map(|t| lookup.get(t.bits.as_slice()).map(|v| t.value * v * t.sign(i, j)))
                    .sum();
                div_pow2(s, *dim)
            }
            (Kernel::Product(a), Kernel::Product(b)) => a.ln_cross(b, i, j).exp(),
            (Kernel::LinearSparse { terms, dim }, Kernel::Product(pk))
            | (Kernel::Product(pk), Kernel::LinearSparse { terms, dim }) => {
                let s: f64 = terms
                    .iter()
                    .map(|t| t.value * pk.spectral(&t.bits) * t.sign(i, j))
                    .sum();
                div_pow2(s, *dim)
            }
            _ => unreachable!("cross_element needs closed-form kernels"),
        }
    }

    /// First row `Q[1, m]` for `m = 1..=2^n`. Needs `n <= 30`.
    pub fn dense_row(&self) -> Result<Vec<f64>> {
        Error::check_dense("dense estimator row", self.dim)?;
        match &self.kernel {
            Kernel::LinearDense { row, .. } | Kernel::Table { row } => Ok(row.clone()),
            Kernel::Product(pk) => pk.dense_row(),
            Kernel::LinearSparse { terms, dim } => {
                let mut b = vec![0.0; 1 << dim];
                for t in terms {
                    b[t.bits.iter().map(|d| 1usize << d).sum::<usize>()] = t.value;
                }
                Ok(fwht(&b)?.into_iter().map(|v| div_pow2(v, *dim)).collect())
            }
            Kernel::Signed { .. } => {
                let first = CellIndex::first(self.dim);
                Ok((0..1u64 << self.dim)
                    .map(|m| {
                        let mut cell = CellIndex::first(self.dim);
                        if m > 0 {
                            cell = CellIndex::new(m + 1, self.dim).expect("in range");
                        }
                        self.element_unchecked(&first, &cell)
                    })
                    .collect())
            }
            Kernel::Mixture(parts) => {
                let mut acc = vec![0.0; 1 << self.dim];
                for (c, e) in parts {
                    for (a, v) in acc.iter_mut().zip(e.dense_row()?) {
                        *a += c * v;
                    }
                }
                Ok(acc)
            }
        }
    }

    fn squared_row(&self) -> Result<Arc<Vec<f64>>> {
        self.squared_row
            .get_or_init(|| {
                let row = self.dense_row()?;
                Ok(Arc::new(xor_autocorrelation(&row)?))
            })
            .clone()
    }
}

impl EstimatorConfig {
    pub fn build(&self) -> Result<Estimator> {
        Estimator::new(self)
    }
}
