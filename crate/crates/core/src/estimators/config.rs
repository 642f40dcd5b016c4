use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ShrinkageSpec;
use crate::transforms::Transform;

/// Tolerance on `sum c_i = 1` for mixture weights.
pub const MIXTURE_WEIGHT_TOL: f64 = 1e-9;

/// Everything that determines an estimator matrix `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorConfig {
    /// `(1 / 2^n) W diag(b) W`.
    Linear { shrinkage: ShrinkageSpec },
    /// `(W diag(b) W)^f / Z`.
    Transformed {
        shrinkage: ShrinkageSpec,
        transform: Transform,
    },
    /// Weighted Aitchison-Aitken kernel: exponential transform of `b_w`.
    Waak { weights: Vec<f64>, gamma: f64 },
    /// Classic Aitchison-Aitken kernel `lambda^(n-d) (1-lambda)^d`.
    AaClassic { n: usize, lambda: f64 },
    /// Convex combination of independently normalized estimators.
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub config: EstimatorConfig,
}

/// `gamma = sqrt(lambda / (1 - lambda))`.
pub fn gamma_from_lambda(lambda: f64) -> f64 {
    (lambda / (1.0 - lambda)).sqrt()
}

/// Inverse of [`gamma_from_lambda`].
pub fn lambda_from_gamma(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    g2 / (1.0 + g2)
}

pub(crate) fn check_waak(weights: &[f64], gamma: f64) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Config("weighted AA kernel needs n >= 1 weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::Config(format!("weight {w} outside [0, 1]")));
    }
    if !(gamma.is_finite() && gamma >= 1.0) {
        return Err(Error::Config(format!(
            "weighted AA kernel needs finite gamma >= 1, got {gamma}"
        )));
    }
    Ok(())
}

impl EstimatorConfig {
    pub fn uniform(n: usize) -> Self {
        EstimatorConfig::Linear {
            shrinkage: ShrinkageSpec::uniform(n),
        }
    }

    /// The data frequency estimator (`b = 1`).
    pub fn frequency(n: usize) -> Result<Self> {
        Ok(EstimatorConfig::Linear {
            shrinkage: ShrinkageSpec::ones(n)?,
        })
    }

    pub fn waak(weights: Vec<f64>, gamma: f64) -> Self {
        EstimatorConfig::Waak { weights, gamma }
    }

    pub fn aa_classic(n: usize, lambda: f64) -> Self {
        EstimatorConfig::AaClassic { n, lambda }
    }

    pub fn mixture(parts: Vec<(f64, EstimatorConfig)>) -> Self {
        EstimatorConfig::Mixture {
            components: parts
                .into_iter()
                .map(|(weight, config)| MixtureComponent { weight, config })
                .collect(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            EstimatorConfig::Linear { .. } => "linear",
            EstimatorConfig::Transformed { .. } => "transformed",
            EstimatorConfig::Waak { .. } => "waak",
            EstimatorConfig::AaClassic { .. } => "aa_classic",
            EstimatorConfig::Mixture { .. } => "mixture",
        }
    }

    pub fn dim(&self) -> Result<usize> {
        match self {
            EstimatorConfig::Linear { shrinkage } | EstimatorConfig::Transformed { shrinkage, .. } => shrinkage.dim(),
            EstimatorConfig::Waak { weights, .. } => Ok(weights.len()),
            EstimatorConfig::AaClassic { n, .. } => Ok(*n),
            EstimatorConfig::Mixture { components } => components
                .first()
                .ok_or_else(|| Error::Config("mixture has no components".into()))?
                .config
                .dim(),
        }
    }

    /// The `(w, gamma)` pair an `aa_classic` config maps to.
    pub fn as_waak(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            EstimatorConfig::Waak { weights, gamma } => Some((weights.clone(), *gamma)),
            EstimatorConfig::AaClassic { n, lambda } => Some((vec![1.0; *n], gamma_from_lambda(*lambda))),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorConfig::Linear { shrinkage } => shrinkage.validate_linear(),
            EstimatorConfig::Transformed { shrinkage, transform } => {
                transform.validate()?;
                shrinkage.validate()
            }
            EstimatorConfig::Waak { weights, gamma } => check_waak(weights, *gamma),
            EstimatorConfig::AaClassic { n, lambda } => {
                if *n == 0 {
                    return Err(Error::Config("aa_classic needs n >= 1".into()));
                }
                if !(0.5..1.0).contains(lambda) {
                    return Err(Error::Config(format!(
                        "aa_classic needs lambda in [1/2, 1), got {lambda}"
                    )));
                }
                Ok(())
            }
            EstimatorConfig::Mixture { components } => {
                let dim = self.dim()?;
                let mut total = 0.0;
                for c in components {
                    if !(c.weight.is_finite() && c.weight > 0.0) {
                        return Err(Error::Config(format!("mixture weight {} must be > 0", c.weight)));
                    }
                    if matches!(c.config, EstimatorConfig::Mixture { .. }) {
                        return Err(Error::Config("nested mixtures are not supported".into()));
                    }
                    c.config.validate()?;
                    let d = c.config.dim()?;
                    if d != dim {
                        return Err(Error::Config(format!("mixture components disagree on n: {dim} vs {d}")));
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
                    return Err(Error::Config(format!("mixture weights sum to {total}, expected 1")));
                }
                Ok(())
            }
        }
    }
}
