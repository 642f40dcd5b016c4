use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{CountsVector, Estimator, EstimatorConfig};
use crate::walsh::CellIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Squared error; the surrogate is minimized.
    Se,
    /// Kullback-Leibler; the surrogate is a log-likelihood and is maximized.
    Kl,
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "se" => Ok(LossKind::Se),
            "kl" => Ok(LossKind::Kl),
            other => Err(Error::Config(format!("unknown loss `{other}`, expected se or kl"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvOptions {
    /// Worker threads for the pair loop; `1` runs serially.
    pub threads: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

impl CvOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: threads.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub loss: LossKind,
    /// SE: `p'p - (2 / |K|) sum loo`. KL: `sum log loo`, `-inf` when dominated.
    #[serde(with = "crate::cross_validation::float")]
    pub value: f64,
    /// A KL term was not positive.
    pub dominated: bool,
    /// One leave-one-out term per observation, in cell order.
    pub loo_terms: Vec<f64>,
    pub config: EstimatorConfig,
    pub element_evaluations: u64,
    pub squared_element_evaluations: u64,
}

impl RiskReport {
    /// A value to minimize for either loss; dominated configs score `+inf`.
    pub fn score(&self) -> f64 {
        match self.loss {
            LossKind::Se => self.value,
            LossKind::Kl if self.dominated => f64::INFINITY,
            LossKind::Kl => -self.value,
        }
    }
}

/// `sum over k' != k of Q[cell(k), cell(k')] / (|K| - 1)` for observation `k`
/// (0-based, in cell order). Duplicates of the held-out cell still count.
pub fn loo_term(k: usize, est: &Estimator, counts: &CountsVector) -> Result<f64> {
    check(est, counts)?;
    let total = counts.total();
    if k as u64 >= total {
        return Err(Error::Config(format!("observation {k} out of range, |K| = {total}")));
    }
    let mut seen = 0u64;
    let cell = counts
        .iter()
        .find(|(_, n)| {
            seen += n;
            seen > k as u64
        })
        .map(|(c, _)| c.clone())
        .expect("k < total");
    let mut s = 0.0;
    for (c, n) in counts.iter() {
        s += n as f64 * est.element(&cell, c)?;
    }
    s -= est.element(&cell, &cell)?;
    Ok(s / (total - 1) as f64)
}

fn check(est: &Estimator, counts: &CountsVector) -> Result<()> {
    if counts.dim() != est.dim() {
        return Err(Error::dim_mismatch(est.dim(), counts.dim()));
    }
    if counts.total() < 2 {
        return Err(Error::InsufficientData(counts.total()));
    }
    Ok(())
}

/// Values of `f` over the unordered distinct-cell pairs `u < v`, in
/// row-major order. Parallel runs collect into the same order.
fn pair_values<F>(cells: &[&CellIndex], opts: CvOptions, f: F) -> Result<Vec<f64>>
where
    F: Fn(&CellIndex, &CellIndex) -> Result<f64> + Sync,
{
    let u = cells.len();
    let pairs: Vec<(usize, usize)> = (0..u).flat_map(|a| (a + 1..u).map(move |b| (a, b))).collect();
    if opts.threads <= 1 {
        return pairs.iter().map(|&(a, b)| f(cells[a], cells[b])).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| pairs.par_iter().map(|&(a, b)| f(cells[a], cells[b])).collect())
}

/// Offset of pair `(a, b)`, `a < b`, in the row-major upper triangle.
#[inline]
fn tri(a: usize, b: usize, u: usize) -> usize {
    a * (2 * u - a - 1) / 2 + (b - a - 1)
}

/// Weighted row sums `sum_v n_v M[u, v]` over a symmetric matrix given by
/// its upper triangle and a constant diagonal, accumulated in index order.
fn row_sums(pairs: &[f64], diag: f64, weights: &[f64]) -> Vec<f64> {
    let u = weights.len();
    (0..u)
        .map(|a| {
            let mut s = 0.0;
            for b in 0..u {
                s += weights[b]
                    * match a.cmp(&b) {
                        std::cmp::Ordering::Less => pairs[tri(a, b, u)],
                        std::cmp::Ordering::Equal => diag,
                        std::cmp::Ordering::Greater => pairs[tri(b, a, u)],
                    };
            }
            s
        })
        .collect()
}

struct Loo {
    /// Per distinct cell.
    terms: Vec<f64>,
    weights: Vec<f64>,
    element_evaluations: u64,
}

fn loo_terms(est: &Estimator, counts: &CountsVector, cells: &[&CellIndex], opts: CvOptions) -> Result<Loo> {
    let weights: Vec<f64> = counts.iter().map(|(_, n)| n as f64).collect();
    let pairs = pair_values(cells, opts, |a, b| est.element(a, b))?;
    let mut evaluations = pairs.len() as u64;
    // Q[c, c] is the same for every c; it only matters for repeated cells
    let repeated = weights.iter().any(|w| *w > 1.0);
    let diag = if repeated {
        evaluations += 1;
        est.element(cells[0], cells[0])?
    } else {
        0.0
    };
    let denom = (counts.total() - 1) as f64;
    let terms = row_sums(&pairs, diag, &weights)
        .into_iter()
        .map(|s| (s - diag) / denom)
        .collect();
    Ok(Loo {
        terms,
        weights,
        element_evaluations: evaluations,
    })
}

fn expand(per_cell: &[f64], weights: &[f64]) -> Vec<f64> {
    per_cell
        .iter()
        .zip(weights)
        .flat_map(|(t, w)| std::iter::repeat_n(*t, *w as usize))
        .collect()
}

/// KL surrogate `sum_k log loo_k`; larger is better.
pub fn kl_risk(est: &Estimator, counts: &CountsVector, opts: CvOptions) -> Result<RiskReport> {
    check(est, counts)?;
    let cells: Vec<&CellIndex> = counts.iter().map(|(c, _)| c).collect();
    let loo = loo_terms(est, counts, &cells, opts)?;
    let dominated = loo.terms.iter().any(|t| !(*t > 0.0));
    let value = if dominated {
        f64::NEG_INFINITY
    } else {
        loo.terms.iter().zip(&loo.weights).map(|(t, w)| w * t.ln()).sum()
    };
    Ok(RiskReport {
        loss: LossKind::Kl,
        value,
        dominated,
        loo_terms: expand(&loo.terms, &loo.weights),
        config: est.config().clone(),
        element_evaluations: loo.element_evaluations,
        squared_element_evaluations: 0,
    })
}

/// SE surrogate `p'p - (2 / |K|) sum_k loo_k`; smaller is better.
///
/// `p'p = p_k' Q^2 p_k` uses squared-matrix elements over observed pairs.
pub fn se_risk(est: &Estimator, counts: &CountsVector, opts: CvOptions) -> Result<RiskReport> {
    check(est, counts)?;
    let cells: Vec<&CellIndex> = counts.iter().map(|(c, _)| c).collect();
    let loo = loo_terms(est, counts, &cells, opts)?;
    let sq_pairs = pair_values(&cells, opts, |a, b| est.squared_element(a, b))?;
    let sq_diag = est.squared_element(cells[0], cells[0])?;
    let n = counts.total() as f64;
    let mut quad = 0.0;
    for (w, s) in loo.weights.iter().zip(row_sums(&sq_pairs, sq_diag, &loo.weights)) {
        quad += w * s;
    }
    let pp = quad / (n * n);
    let loo_sum: f64 = loo.terms.iter().zip(&loo.weights).map(|(t, w)| w * t).sum();
    Ok(RiskReport {
        loss: LossKind::Se,
        value: pp - 2.0 * loo_sum / n,
        dominated: false,
        loo_terms: expand(&loo.terms, &loo.weights),
        config: est.config().clone(),
        element_evaluations: loo.element_evaluations,
        squared_element_evaluations: sq_pairs.len() as u64 + 1,
    })
}

pub fn risk(loss: LossKind, est: &Estimator, counts: &CountsVector, opts: CvOptions) -> Result<RiskReport> {
    match loss {
        LossKind::Se => se_risk(est, counts, opts),
        LossKind::Kl => kl_risk(est, counts, opts),
    }
}
