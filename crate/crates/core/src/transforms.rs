//! Element-wise monotone transforms of the Walsh diagonalization and their
//! normalizers.
//!
//! Every row of `W diag(b) W` holds the same multiset of values, so any
//! element-wise transform `f` is normalized by the single row sum
//! `Z = sum_j f([W b]_j)`. For `b = b_w` the logistic and exponential
//! transforms have closed forms; everything else goes through one fast
//! Walsh-Hadamard transform.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ShrinkageSpec;

/// Largest `|x ln(gamma)|` accepted by the exponential transform.
pub const EXP_ARG_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    Identity,
    /// `gamma^x`
    Exponential {
        gamma: f64,
    },
    /// `1 / (1 + gamma^-x)`
    Logistic {
        gamma: f64,
    },
    /// `low` for `x < threshold`, `high` otherwise.
    Step {
        threshold: f64,
        low: f64,
        high: f64,
    },
    Relu,
    /// `tanh(scale * x)`
    Tanh {
        scale: f64,
    },
    /// `x` for `x > 0`, `alpha (e^x - 1)` otherwise.
    Elu {
        alpha: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerMethod {
    LinearTrivial,
    ClosedFormLogistic,
    ClosedFormExponential,
    FwhtGeneral,
}

/// The row sum `Z` of a transformed diagonalization.
///
/// `ln_value` is always finite for a successful result; `value` may
/// overflow to infinity in the closed-form regimes at very large `n`, where
/// elements are evaluated in the log domain instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizerResult {
    pub value: f64,
    pub ln_value: f64,
    pub method: NormalizerMethod,
}

impl NormalizerResult {
    fn from_ln(ln_value: f64, method: NormalizerMethod) -> Self {
        Self {
            value: ln_value.exp(),
            ln_value,
            method,
        }
    }

    /// `Z = 2^k`, exact whenever it is representable.
    fn from_pow2(k: usize, method: NormalizerMethod) -> Self {
        Self {
            value: if k <= 1023 { 2f64.powi(k as i32) } else { f64::INFINITY },
            ln_value: k as f64 * LN_2,
            method,
        }
    }

    fn from_sum(sum: f64) -> Result<Self> {
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::DegenerateNormalizer(sum));
        }
        Ok(Self {
            value: sum,
            ln_value: sum.ln(),
            method: NormalizerMethod::FwhtGeneral,
        })
    }
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl Transform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::Identity | Transform::Relu => Ok(()),
            Transform::Exponential { gamma } | Transform::Logistic { gamma } => positive_finite("gamma", gamma),
            Transform::Tanh { scale } => positive_finite("tanh scale", scale),
            Transform::Elu { alpha } => {
                if alpha.is_finite() && alpha >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("elu alpha must be >= 0, got {alpha}")))
                }
            }
            Transform::Step { threshold, low, high } => {
                if !(threshold.is_finite() && low.is_finite() && high.is_finite()) {
                    return Err(Error::Config("step parameters must be finite".into()));
                }
                if high >= low && low >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "step needs high >= low >= 0, got low = {low}, high = {high}"
                    )))
                }
            }
        }
    }

    /// True when `f(x) >= 0` everywhere, which makes every estimate
    /// nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            Transform::Exponential { .. } | Transform::Logistic { .. } | Transform::Relu => true,
            Transform::Step { low, .. } => *low >= 0.0,
            Transform::Identity | Transform::Tanh { .. } | Transform::Elu { .. } => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Exponential { .. } => "exponential",
            Transform::Logistic { .. } => "logistic",
            Transform::Step { .. } => "step",
            Transform::Relu => "relu",
            Transform::Tanh { .. } => "tanh",
            Transform::Elu { .. } => "elu",
        }
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("transform input {x} is not finite")));
        }
        Ok(match *self {
            Transform::Identity => x,
            Transform::Exponential { gamma } => {
                let z = x * gamma.ln();
                if z.abs() > EXP_ARG_LIMIT {
                    return Err(Error::Overflow(format!(
                        "gamma^x with x ln(gamma) = {z} exceeds {EXP_ARG_LIMIT}"
                    )));
                }
                z.exp()
            }
            Transform::Logistic { gamma } => {
                let z = x * gamma.ln();
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            Transform::Step { threshold, low, high } => {
                if x < threshold {
                    low
                } else {
                    high
                }
            }
            Transform::Relu => x.max(0.0),
            Transform::Tanh { scale } => (scale * x).tanh(),
            Transform::Elu { alpha } => {
                if x > 0.0 {
                    x
                } else {
                    alpha * x.exp_m1()
                }
            }
        })
    }
}

/// `ln(gamma^w + gamma^-w)` without overflow.
#[inline]
pub(crate) fn ln_cosh_pair(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `f(W b)` together with its sum. Needs `n <= 30`.
pub fn transformed_row(t: &Transform, b: &ShrinkageSpec) -> Result<(Vec<f64>, NormalizerResult)> {
    t.validate()?;
    b.validate()?;
    let mut row = b.walsh_row()?;
    for v in row.iter_mut() {
        *v = t.apply(*v)?;
    }
    // fixed-order summation keeps the result reproducible
    let sum: f64 = row.iter().sum();
    Ok((row, NormalizerResult::from_sum(sum)?))
}

/// `Z = sum_j f([W b]_j)`, using the cheapest available route.
pub fn normalizer(t: &Transform, b: &ShrinkageSpec) -> Result<NormalizerResult> {
    t.validate()?;
    b.validate()?;
    let n = b.dim()?;
    match (t, b) {
        (Transform::Identity, _) if b.first_coefficient() == 1.0 => {
            Ok(NormalizerResult::from_pow2(n, NormalizerMethod::LinearTrivial))
        }
        (Transform::Logistic { .. }, ShrinkageSpec::SingleInteraction { .. }) => {
            Ok(NormalizerResult::from_pow2(n - 1, NormalizerMethod::ClosedFormLogistic))
        }
        (Transform::Exponential { gamma }, ShrinkageSpec::SingleInteraction { w }) => {
            let lg = gamma.ln();
            let ln_z = w.iter().map(|&x| ln_cosh_pair(x * lg)).sum();
            Ok(NormalizerResult::from_ln(ln_z, NormalizerMethod::ClosedFormExponential))
        }
        _ => transformed_row(t, b).map(|(_, z)| z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::walsh_entry;

    fn all_kinds() -> Vec<Transform> {
        vec![
            Transform::Identity,
            Transform::Exponential { gamma: 1.7 },
            Transform::Exponential { gamma: 0.6 },
            Transform::Logistic { gamma: 3.0 },
            Transform::Step {
                threshold: 0.1,
                low: 0.2,
                high: 1.5,
            },
            Transform::Relu,
            Transform::Tanh { scale: 0.8 },
            Transform::Elu { alpha: 0.5 },
        ]
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Transform::Identity.apply(3.5).unwrap(), 3.5);
        let e = Transform::Exponential { gamma: 2.0 }.apply(3.0).unwrap();
        assert!((e - 8.0).abs() < 1e-12);
        let l = Transform::Logistic {
            gamma: std::f64::consts::E,
        };
        assert_eq!(l.apply(0.0).unwrap(), 0.5);
        for x in [0.3, 1.7, 12.0] {
            let s = l.apply(x).unwrap() + l.apply(-x).unwrap();
            assert!((s - 1.0).abs() < 1e-15);
        }
        let step = Transform::Step {
            threshold: 1.0,
            low: 0.0,
            high: 2.0,
        };
        assert_eq!(step.apply(0.999).unwrap(), 0.0);
        assert_eq!(step.apply(1.0).unwrap(), 2.0);
        assert_eq!(Transform::Relu.apply(-2.0).unwrap(), 0.0);
        assert!((Transform::Elu { alpha: 1.0 }.apply(-1.0).unwrap() - (-1.0f64).exp_m1()).abs() < 1e-16);
    }

    #[test]
    fn overflow_is_rejected() {
        let t = Transform::Exponential { gamma: 2.0 };
        assert!(matches!(t.apply(1100.0), Err(Error::Overflow(_))));
        assert!(t.apply(1000.0).is_ok());
        assert!(matches!(t.apply(f64::NAN), Err(Error::Domain(_))));
        // logistic saturates instead
        let l = Transform::Logistic { gamma: 2.0 };
        assert_eq!(l.apply(-5000.0).unwrap(), 0.0);
    }

    #[test]
    fn parameter_domains() {
        assert!(Transform::Exponential { gamma: 0.0 }.validate().is_err());
        assert!(Transform::Logistic { gamma: -1.0 }.validate().is_err());
        assert!(Transform::Elu { alpha: -0.1 }.validate().is_err());
        assert!(Transform::Tanh { scale: 0.0 }.validate().is_err());
        assert!(Transform::Step {
            threshold: 0.0,
            low: 1.0,
            high: 0.5
        }
        .validate()
        .is_err());
        assert!(Transform::Step {
            threshold: 0.0,
            low: -1.0,
            high: 0.5
        }
        .validate()
        .is_err());
        for t in all_kinds() {
            t.validate().unwrap();
        }
    }

    #[test]
    fn nonnegativity_flags() {
        let flags: Vec<bool> = all_kinds().iter().map(|t| t.is_nonnegative()).collect();
        assert_eq!(flags, vec![false, true, true, true, true, true, false, false]);
    }

    #[test]
    fn normalizer_examples() {
        let z = normalizer(&Transform::Identity, &ShrinkageSpec::uniform(5)).unwrap();
        assert_eq!(z.method, NormalizerMethod::LinearTrivial);
        assert!((z.value - 32.0).abs() < 1e-9);

        let b = ShrinkageSpec::single_interaction(vec![1.0, 1.0]);
        let z = normalizer(&Transform::Exponential { gamma: 2.0 }, &b).unwrap();
        assert_eq!(z.method, NormalizerMethod::ClosedFormExponential);
        assert!((z.value - 6.25).abs() < 1e-12);

        let b = ShrinkageSpec::single_interaction(vec![0.3, 0.7, 0.1]);
        for gamma in [0.2, 1.0, 5.0] {
            let z = normalizer(&Transform::Logistic { gamma }, &b).unwrap();
            assert_eq!(z.method, NormalizerMethod::ClosedFormLogistic);
            assert!((z.value - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_without_unit_first_uses_general_path() {
        let b = ShrinkageSpec::Dense {
            values: vec![0.5, 0.3, 0.2, 0.1],
        };
        let z = normalizer(&Transform::Identity, &b).unwrap();
        assert_eq!(z.method, NormalizerMethod::FwhtGeneral);
        // the column sums of W vanish except the first, so Z = 2^n b_1
        assert!((z.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn general_path_matches_dense_sum() {
        let n = 5;
        let mut values: Vec<f64> = (0..32).map(|k| ((k * 7 % 11) as f64) / 11.0).collect();
        values[0] = 1.0;
        let b = ShrinkageSpec::Dense { values: values.clone() };
        for t in all_kinds() {
            let (row, z) = transformed_row(&t, &b).unwrap();
            let mut sum = 0.0;
            for j in 1..=32u64 {
                let s: f64 = (1..=32u64)
                    .map(|k| values[k as usize - 1] * walsh_entry(k, j, n).unwrap() as f64)
                    .sum();
                let f = t.apply(s).unwrap();
                assert!((row[j as usize - 1] - f).abs() < 1e-9);
                sum += f;
            }
            if sum > 0.0 {
                assert!((z.value - sum).abs() <= 1e-10 * sum.abs());
            }
        }
    }

    #[test]
    fn closed_forms_at_high_dimension() {
        let w = vec![0.9; 10_000];
        let b = ShrinkageSpec::single_interaction(w);
        let z = normalizer(&Transform::Exponential { gamma: 2.0 }, &b).unwrap();
        assert!(z.ln_value.is_finite());
        assert!(z.value.is_infinite());
        let expected = 10_000.0 * (2f64.powf(0.9) + 2f64.powf(-0.9)).ln();
        assert!((z.ln_value - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn log_helpers() {
        assert!((ln_cosh_pair(0.5) - (0.5f64.exp() + (-0.5f64).exp()).ln()).abs() < 1e-15);
    }
}
