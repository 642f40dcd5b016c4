use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, MAX_FULL_DIM};
use crate::estimators::kernel::div_pow2;
use crate::estimators::{CountsVector, Estimator, EstimatorConfig, ShrinkageSpec};
use crate::transforms::{NormalizerResult, Transform};
use crate::walsh::{fwht_in_place, CellIndex};

/// Estimated probabilities at a list of cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    #[serde(with = "cell_strings")]
    pub cells: Vec<CellIndex>,
    pub values: Vec<f64>,
    pub normalizers: Vec<NormalizerResult>,
    /// Some value came out below zero.
    pub negative: bool,
    /// Set once [`DensityEstimate::clamp_and_renormalize`] has run.
    #[serde(default)]
    pub clamped: bool,
}

mod cell_strings {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::walsh::CellIndex;

    pub fn serialize<S: Serializer>(cells: &[CellIndex], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = cells.iter().map(CellIndex::to_sign_string).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CellIndex>, D::Error> {
        use serde::de::Error as _;
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| CellIndex::parse(s, s.len()).map_err(D::Error::custom))
            .collect()
    }
}

impl DensityEstimate {
    fn new(cells: Vec<CellIndex>, values: Vec<f64>, est: &Estimator) -> Self {
        let negative = values.iter().any(|v| *v < 0.0);
        Self {
            cells,
            values,
            normalizers: est.normalizers().to_vec(),
            negative,
            clamped: false,
        }
    }

    pub fn value_at(&self, cell: &CellIndex) -> Option<f64> {
        self.cells.iter().position(|c| c == cell).map(|k| self.values[k])
    }

    /// Sets negative values to zero and rescales to sum one.
    ///
    /// This post-processing step is not part of the estimator and is only
    /// allowed on a full `2^n` vector.
    pub fn clamp_and_renormalize(&mut self) -> Result<()> {
        let dim = self.cells.first().map_or(0, CellIndex::dim);
        if self.cells.len() as u128 != 1u128 << dim {
            return Err(Error::Config(
                "clamping needs the full estimate over all 2^n cells".into(),
            ));
        }
        self.values.iter_mut().for_each(|v| *v = v.max(0.0));
        let total: f64 = self.values.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateNormalizer(total));
        }
        self.values.iter_mut().for_each(|v| *v /= total);
        self.clamped = true;
        Ok(())
    }
}

/// `p(c) = sum over observed c' of Q[c, c'] * count(c') / |K|`.
fn value_at(est: &Estimator, counts: &CountsVector, cell: &CellIndex) -> f64 {
    let s: f64 = counts
        .iter()
        .map(|(c, n)| est.element_unchecked(cell, c) * n as f64)
        .sum();
    s / counts.total() as f64
}

/// Estimates at the given cells in `O(|cells| |support| element)` time.
pub fn estimate_at(cells: &[CellIndex], est: &Estimator, counts: &CountsVector) -> Result<DensityEstimate> {
    if counts.dim() != est.dim() {
        return Err(Error::dim_mismatch(est.dim(), counts.dim()));
    }
    if let Some(c) = cells.iter().find(|c| c.dim() != est.dim()) {
        return Err(Error::dim_mismatch(est.dim(), c.dim()));
    }
    let values = cells.par_iter().map(|c| value_at(est, counts, c)).collect();
    Ok(DensityEstimate::new(cells.to_vec(), values, est))
}

/// Every cell in index order. Needs `n <= 20`.
pub fn estimate_full(est: &Estimator, counts: &CountsVector) -> Result<DensityEstimate> {
    let n = est.dim();
    if n > MAX_FULL_DIM {
        return Err(Error::capacity("full density estimate", n, MAX_FULL_DIM));
    }
    if counts.dim() != n {
        return Err(Error::dim_mismatch(n, counts.dim()));
    }
    let size = 1usize << n;
    let cells: Vec<CellIndex> = (0..size as u64)
        .map(|m| CellIndex::new(m + 1, n).expect("in range"))
        .collect();

    // a direct sum over the support reproduces estimate_at bit for bit and
    // is cheaper than transforms when the data are sparse
    if counts.support_len() <= 4 * n.max(1) {
        return estimate_at(&cells, est, counts);
    }
    // identity with b_1 = 1 is the linear estimator under another name
    let linear_b = match est.config() {
        EstimatorConfig::Linear { shrinkage } => Some(match shrinkage {
            ShrinkageSpec::Dense { values } => {
                let mut b = values.clone();
                b[0] = 1.0;
                b
            }
            other => other.with_unit_first()?.to_dense()?,
        }),
        EstimatorConfig::Transformed {
            shrinkage,
            transform: Transform::Identity,
        } if shrinkage.first_coefficient() == 1.0 => Some(shrinkage.to_dense()?),
        _ => None,
    };
    let values = match linear_b {
        Some(b) => {
            // p = (1 / 2^n) W (b . W p_k); raw counts keep both transforms
            // in exact integer arithmetic for b = 1 and b = e_1
            let mut v = vec![0.0; size];
            for (cell, c) in counts.iter() {
                v[cell.zero_based_words()[0] as usize] = c as f64;
            }
            fwht_in_place(&mut v)?;
            v.iter_mut().zip(&b).for_each(|(x, bk)| *x *= bk);
            fwht_in_place(&mut v)?;
            let total = counts.total() as f64;
            v.iter_mut().for_each(|x| *x = div_pow2(*x, n) / total);
            v
        }
        None => crate::walsh::xor_convolve(&est.dense_row()?, &counts.to_dense()?)?,
    };
    Ok(DensityEstimate::new(cells, values, est))
}
