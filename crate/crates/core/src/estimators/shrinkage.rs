use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walsh::{dim_of_len, fwht, CellIndex};

/// One nonzero coefficient of a sparse shrinkage vector.
///
/// The coefficient is named by the variables whose product it shrinks
/// (1-based, empty for the constant coefficient `b_1`). In config files it may
/// also be given as a 1-based coefficient `index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSparseEntry")]
pub struct SparseEntry {
    pub vars: Vec<usize>,
    pub value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSparseEntry {
    #[serde(default)]
    vars: Option<Vec<usize>>,
    #[serde(default)]
    index: Option<u64>,
    value: f64,
}

impl TryFrom<RawSparseEntry> for SparseEntry {
    type Error = String;

    fn try_from(raw: RawSparseEntry) -> std::result::Result<Self, String> {
        match (raw.vars, raw.index) {
            (Some(vars), None) => Ok(SparseEntry::new(vars, raw.value)),
            (None, Some(index)) => SparseEntry::from_index(index, raw.value).map_err(|e| e.to_string()),
            _ => Err("sparse entry needs exactly one of `vars` or `index`".into()),
        }
    }
}

impl SparseEntry {
    pub fn new(mut vars: Vec<usize>, value: f64) -> Self {
        vars.sort_unstable();
        Self { vars, value }
    }

    /// Entry for 1-based coefficient index `index`.
    pub fn from_index(index: u64, value: f64) -> Result<Self> {
        if index == 0 {
            return Err(Error::Range { index, dim: 64 });
        }
        let z = index - 1;
        let vars = (0..64).filter(|b| (z >> b) & 1 == 1).map(|b| b + 1).collect();
        Ok(Self { vars, value })
    }
}

/// The shrinkage vector `b` of the diagonalization `W diag(b) W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShrinkageSpec {
    /// All `2^n` coefficients.
    Dense { values: Vec<f64> },
    /// Listed coefficients; the rest are zero.
    Sparse { n: usize, entries: Vec<SparseEntry> },
    /// `b_w`: weight `w_k` on the coefficient of `X_k` alone, zero elsewhere.
    SingleInteraction { w: Vec<f64> },
}

/// A nonzero coefficient in bit form: zero-based variable positions.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Term {
    pub bits: Vec<usize>,
    pub value: f64,
}

impl Term {
    /// `W[k, i ^ j]` for the coefficient `k` of this term.
    #[inline]
    pub fn sign(&self, i: &CellIndex, j: &CellIndex) -> f64 {
        let flips = self.bits.iter().filter(|&&d| i.bit(d) != j.bit(d)).count();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl ShrinkageSpec {
    /// `b = e_1`: the fully smoothed (uniform) estimator.
    pub fn uniform(n: usize) -> Self {
        ShrinkageSpec::Sparse {
            n,
            entries: vec![SparseEntry::new(vec![], 1.0)],
        }
    }

    /// `b = 1`: the unregularized frequency estimator.
    pub fn ones(n: usize) -> Result<Self> {
        Error::check_dense("dense shrinkage vector", n)?;
        Ok(ShrinkageSpec::Dense {
            values: vec![1.0; 1 << n],
        })
    }

    pub fn single_interaction(w: Vec<f64>) -> Self {
        ShrinkageSpec::SingleInteraction { w }
    }

    pub fn dim(&self) -> Result<usize> {
        match self {
            ShrinkageSpec::Dense { values } => dim_of_len(values.len()),
            ShrinkageSpec::Sparse { n, .. } => Ok(*n),
            ShrinkageSpec::SingleInteraction { w } => Ok(w.len()),
        }
        .and_then(|n| {
            if n == 0 {
                Err(Error::Shape("shrinkage dimension must be >= 1".into()))
            } else {
                Ok(n)
            }
        })
    }

    fn values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match self {
            ShrinkageSpec::Dense { values } => Box::new(values.iter().copied()),
            ShrinkageSpec::Sparse { entries, .. } => Box::new(entries.iter().map(|e| e.value)),
            ShrinkageSpec::SingleInteraction { w } => Box::new(w.iter().copied()),
        }
    }

    /// Structural checks shared by every estimator.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim()?;
        if let Some(v) = self.values().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("shrinkage value {v} is not finite")));
        }
        match self {
            ShrinkageSpec::Sparse { entries, .. } => {
                let mut seen = std::collections::BTreeSet::new();
                for e in entries {
                    if let Some(&v) = e.vars.iter().find(|&&v| v == 0 || v > n) {
                        return Err(Error::Config(format!(
                            "sparse entry names variable {v}, outside [1, {n}]"
                        )));
                    }
                    if e.vars.windows(2).any(|p| p[0] == p[1]) {
                        return Err(Error::Config(format!("sparse entry repeats a variable: {:?}", e.vars)));
                    }
                    if !seen.insert(e.vars.clone()) {
                        return Err(Error::Config(format!("sparse entry {:?} listed twice", e.vars)));
                    }
                }
            }
            ShrinkageSpec::SingleInteraction { w } => {
                if let Some(x) = w.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(Error::Config(format!("weight {x} outside [0, 1]")));
                }
            }
            ShrinkageSpec::Dense { .. } => {}
        }
        Ok(())
    }

    /// Checks for the untransformed estimator: `b` in `[0, 1]` and `b_1 = 1`.
    ///
    /// A sparse vector without a constant entry, or a single-interaction
    /// vector, is read with `b_1 = 1`.
    pub fn validate_linear(&self) -> Result<()> {
        self.validate()?;
        if let Some(v) = self.values().find(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config(format!("linear estimator needs b in [0, 1], found {v}")));
        }
        let b1 = match self {
            ShrinkageSpec::Dense { values } => Some(values[0]),
            ShrinkageSpec::Sparse { entries, .. } => entries.iter().find(|e| e.vars.is_empty()).map(|e| e.value),
            ShrinkageSpec::SingleInteraction { .. } => None,
        };
        match b1 {
            Some(v) if v != 1.0 => Err(Error::Config(format!("linear estimator needs b_1 = 1, found {v}"))),
            _ => Ok(()),
        }
    }

    /// The constant coefficient `b_1` as stored (zero when absent).
    pub fn first_coefficient(&self) -> f64 {
        match self {
            ShrinkageSpec::Dense { values } => values[0],
            ShrinkageSpec::Sparse { entries, .. } => {
                entries.iter().find(|e| e.vars.is_empty()).map_or(0.0, |e| e.value)
            }
            ShrinkageSpec::SingleInteraction { .. } => 0.0,
        }
    }

    /// Number of stored coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.values().filter(|v| *v != 0.0).count()
    }

    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let n = self.dim()?;
        Error::check_dense("dense shrinkage vector", n)?;
        let mut dense = vec![0.0; 1 << n];
        match self {
            ShrinkageSpec::Dense { values } => dense.copy_from_slice(values),
            ShrinkageSpec::Sparse { entries, .. } => {
                for e in entries {
                    let k: usize = e.vars.iter().map(|v| 1usize << (v - 1)).sum();
                    dense[k] = e.value;
                }
            }
            ShrinkageSpec::SingleInteraction { w } => {
                for (k, &x) in w.iter().enumerate() {
                    dense[1 << k] = x;
                }
            }
        }
        Ok(dense)
    }

    /// `W b`, the row of signed sums shared by every row of `W diag(b) W`.
    pub fn walsh_row(&self) -> Result<Vec<f64>> {
        fwht(&self.to_dense()?)
    }

    /// Nonzero coefficients in bit form.
    pub(crate) fn terms(&self) -> Vec<Term> {
        match self {
            ShrinkageSpec::Dense { values } => values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, &value)| Term {
                    bits: (0..usize::BITS as usize).filter(|b| (k >> b) & 1 == 1).collect(),
                    value,
                })
                .collect(),
            ShrinkageSpec::Sparse { entries, .. } => entries
                .iter()
                .filter(|e| e.value != 0.0)
                .map(|e| Term {
                    bits: e.vars.iter().map(|v| v - 1).collect(),
                    value: e.value,
                })
                .collect(),
            ShrinkageSpec::SingleInteraction { w } => w
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .map(|(k, &value)| Term { bits: vec![k], value })
                .collect(),
        }
    }

    /// Terms with `b_1` forced to one, as the linear estimator reads them.
    pub(crate) fn linear_terms(&self) -> Vec<Term> {
        let mut terms = self.terms();
        terms.retain(|t| !t.bits.is_empty());
        terms.insert(
            0,
            Term {
                bits: vec![],
                value: 1.0,
            },
        );
        terms
    }

    /// The same vector with `b_1 = 1` made explicit.
    pub(crate) fn with_unit_first(&self) -> Result<ShrinkageSpec> {
        Ok(match self {
            ShrinkageSpec::Dense { values } => {
                let mut values = values.clone();
                values[0] = 1.0;
                ShrinkageSpec::Dense { values }
            }
            other => {
                let n = other.dim()?;
                let entries = other
                    .linear_terms()
                    .into_iter()
                    .map(|t| SparseEntry::new(t.bits.iter().map(|d| d + 1).collect(), t.value))
                    .collect();
                ShrinkageSpec::Sparse { n, entries }
            }
        })
    }
}

/// Square-error optimal shrinkage of a sample mean of `samples` draws of a
/// `{-1, 1}` variable with true mean `q`: `N q^2 / ((N - 1) q^2 + 1)`.
pub fn shrinkage_optimal(q: f64, samples: u64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("|q| must be <= 1, got {q}")));
    }
    if samples == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let n = samples as f64;
    let q2 = q * q;
    Ok(n * q2 / ((n - 1.0) * q2 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinkage_examples() {
        for n in [1, 2, 10, 1000] {
            assert_eq!(shrinkage_optimal(1.0, n).unwrap(), 1.0);
            assert_eq!(shrinkage_optimal(-1.0, n).unwrap(), 1.0);
            assert_eq!(shrinkage_optimal(0.0, n).unwrap(), 0.0);
        }
        let b = shrinkage_optimal(0.5, 4).unwrap();
        assert!((b - 4.0 / 7.0).abs() < 1e-15);
        assert!(shrinkage_optimal(1.5, 3).is_err());
        assert!(shrinkage_optimal(0.5, 0).is_err());
    }

    #[test]
    fn dense_expansion() {
        let b = ShrinkageSpec::single_interaction(vec![0.1, 0.2, 0.3]);
        let d = b.to_dense().unwrap();
        assert_eq!(d, vec![0.0, 0.1, 0.2, 0.0, 0.3, 0.0, 0.0, 0.0]);

        let s = ShrinkageSpec::Sparse {
            n: 3,
            entries: vec![SparseEntry::new(vec![], 1.0), SparseEntry::from_index(7, 0.5).unwrap()],
        };
        assert_eq!(s.to_dense().unwrap()[6], 0.5);
        assert_eq!(SparseEntry::from_index(7, 0.5).unwrap().vars, vec![2, 3]);
    }

    #[test]
    fn validation() {
        assert!(ShrinkageSpec::Dense { values: vec![1.0; 3] }.validate().is_err());
        assert!(ShrinkageSpec::single_interaction(vec![0.5, 1.2]).validate().is_err());
        let dup = ShrinkageSpec::Sparse {
            n: 3,
            entries: vec![SparseEntry::new(vec![1], 0.2), SparseEntry::new(vec![1], 0.3)],
        };
        assert!(dup.validate().is_err());
        let out = ShrinkageSpec::Sparse {
            n: 2,
            entries: vec![SparseEntry::new(vec![3], 0.2)],
        };
        assert!(out.validate().is_err());

        let neg = ShrinkageSpec::Dense {
            values: vec![1.0, -0.2],
        };
        assert!(neg.validate().is_ok());
        assert!(neg.validate_linear().is_err());
        let bad_b1 = ShrinkageSpec::Dense { values: vec![0.5, 0.2] };
        assert!(bad_b1.validate_linear().is_err());
        assert!(ShrinkageSpec::uniform(4).validate_linear().is_ok());
    }

    #[test]
    fn serde_forms() {
        let s: ShrinkageSpec = serde_json::from_str(
            r#"{"form":"sparse","n":4,"entries":[{"index":1,"value":1.0},{"vars":[2,1],"value":0.3}]}"#,
        )
        .unwrap();
        match &s {
            ShrinkageSpec::Sparse { entries, .. } => {
                assert!(entries[0].vars.is_empty());
                assert_eq!(entries[1].vars, vec![1, 2]);
            }
            _ => panic!("wrong form"),
        }
        let round: ShrinkageSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(round, s);
        assert!(serde_json::from_str::<SparseEntry>(r#"{"value":1.0}"#).is_err());
    }
}
