//! Seeded synthetic hypercube data with known structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walsh::{CellIndex, HypercubePoint};

/// A distribution on `{-1, 1}^n` that can be sampled at any `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum Planted {
    /// `p(x) = (1 + sum_d a_d x_d) / 2^n`: only the constant and first-order
    /// Walsh coefficients are nonzero. Needs `sum |a_d| <= 1`.
    SingleInteraction { coefficients: Vec<f64> },
    /// Independent coordinates with `E[X_d] = means[d]`.
    Product { means: Vec<f64> },
    /// Pick a prototype uniformly, then flip coordinate `d` with
    /// probability `flip[d]`. A flip of `0.5` makes `X_d` a fair coin
    /// independent of everything else.
    Clusters { prototypes: Vec<String>, flip: Vec<f64> },
}

impl Planted {
    pub fn dim(&self) -> usize {
        match self {
            Planted::SingleInteraction { coefficients } => coefficients.len(),
            Planted::Product { means } => means.len(),
            Planted::Clusters { flip, .. } => flip.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::Config("planted model needs n >= 1".into()));
        }
        match self {
            Planted::SingleInteraction { coefficients } => {
                let total: f64 = coefficients.iter().map(|a| a.abs()).sum();
                if !(total <= 1.0) {
                    return Err(Error::Config(format!(
                        "first-order coefficients need sum |a_d| <= 1, got {total}"
                    )));
                }
            }
            Planted::Product { means } => {
                if means.iter().any(|m| !(-1.0..=1.0).contains(m)) {
                    return Err(Error::Config("product means must lie in [-1, 1]".into()));
                }
            }
            Planted::Clusters { prototypes, flip } => {
                if prototypes.is_empty() {
                    return Err(Error::Config("clusters need at least one prototype".into()));
                }
                for p in prototypes {
                    if HypercubePoint::parse_signs(p)?.dim() != flip.len() {
                        return Err(Error::dim_mismatch(flip.len(), p.len()));
                    }
                }
                if flip.iter().any(|f| !(0.0..=1.0).contains(f)) {
                    return Err(Error::Config("flip probabilities must lie in [0, 1]".into()));
                }
            }
        }
        Ok(())
    }

    /// `k` independent draws from the generator seeded with `seed`.
    pub fn sample(&self, k: usize, seed: u64) -> Result<Vec<HypercubePoint>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let prototypes: Vec<HypercubePoint> = match self {
            Planted::Clusters { prototypes, .. } => prototypes
                .iter()
                .map(|p| HypercubePoint::parse_signs(p))
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        let coin = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1i8 } else { -1 };
        (0..k)
            .map(|_| {
                let entries: Vec<i8> = match self {
                    Planted::SingleInteraction { coefficients } => {
                        // mixture of the uniform law and laws pinning one X_d
                        let mut x: Vec<i8> = (0..n).map(|_| coin(&mut rng)).collect();
                        let mut u: f64 = rng.random();
                        for (d, a) in coefficients.iter().enumerate() {
                            if u < a.abs() {
                                x[d] = if *a > 0.0 { 1 } else { -1 };
                                break;
                            }
                            u -= a.abs();
                        }
                        x
                    }
                    Planted::Product { means } => means
                        .iter()
                        .map(|m| if rng.random::<f64>() < (1.0 + m) / 2.0 { 1 } else { -1 })
                        .collect(),
                    Planted::Clusters { flip, .. } => {
                        let proto = &prototypes[rng.random_range(0..prototypes.len())];
                        proto
                            .entries()
                            .iter()
                            .zip(flip)
                            .map(|(&s, &f)| if rng.random::<f64>() < f { -s } else { s })
                            .collect()
                    }
                };
                HypercubePoint::new(entries)
            })
            .collect()
    }

    /// Exact probability of a cell.
    pub fn probability(&self, cell: &CellIndex) -> Result<f64> {
        self.validate()?;
        if cell.dim() != self.dim() {
            return Err(Error::dim_mismatch(self.dim(), cell.dim()));
        }
        let sign = |d: usize| if cell.bit(d) { -1.0 } else { 1.0 };
        let n = self.dim() as i32;
        Ok(match self {
            Planted::SingleInteraction { coefficients } => {
                let s: f64 = coefficients.iter().enumerate().map(|(d, a)| a * sign(d)).sum();
                (1.0 + s) * 0.5f64.powi(n)
            }
            Planted::Product { means } => means
                .iter()
                .enumerate()
                .map(|(d, m)| (1.0 + m * sign(d)) / 2.0)
                .product(),
            Planted::Clusters { prototypes, flip } => {
                let mut total = 0.0;
                for p in prototypes {
                    let p = HypercubePoint::parse_signs(p)?;
                    total += p
                        .entries()
                        .iter()
                        .zip(flip)
                        .enumerate()
                        .map(|(d, (&s, &f))| if s as f64 == sign(d) { 1.0 - f } else { f })
                        .product::<f64>();
                }
                total / prototypes.len() as f64
            }
        })
    }
}
