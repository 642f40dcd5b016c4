use serde::{Deserialize, Serialize};

use crate::cross_validation::{risk, CvOptions, LossKind, RiskReport};
use crate::error::{Error, Result};
use crate::estimators::{CountsVector, EstimatorConfig, MixtureComponent, ShrinkageSpec, SparseEntry};
use crate::transforms::Transform;

/// One parameter axis of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", rename_all = "snake_case", deny_unknown_fields)]
pub enum Axis {
    /// `gamma` of a weighted AA kernel or an exponential/logistic transform.
    Gamma {
        values: Vec<f64>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// `lambda` of a classic AA kernel.
    Lambda {
        values: Vec<f64>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// One weight `w_d` (1-based `dim`) of a WAAK or `b_w` config.
    Weight {
        dim: usize,
        values: Vec<f64>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// Every weight set to the same value.
    AllWeights {
        values: Vec<f64>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// The sparse shrinkage coefficient of the given variable product.
    Shrinkage {
        vars: Vec<usize>,
        values: Vec<f64>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// Whole transforms to try.
    Transform {
        values: Vec<Transform>,
        #[serde(default)]
        component: Option<usize>,
    },
    /// Full mixture weight vectors, one per grid point.
    MixtureWeights { values: Vec<Vec<f64>> },
}

impl Axis {
    pub fn len(&self) -> usize {
        match self {
            Axis::Gamma { values, .. }
            | Axis::Lambda { values, .. }
            | Axis::Weight { values, .. }
            | Axis::AllWeights { values, .. }
            | Axis::Shrinkage { values, .. } => values.len(),
            Axis::Transform { values, .. } => values.len(),
            Axis::MixtureWeights { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn component(&self) -> Option<usize> {
        match self {
            Axis::Gamma { component, .. }
            | Axis::Lambda { component, .. }
            | Axis::Weight { component, .. }
            | Axis::AllWeights { component, .. }
            | Axis::Shrinkage { component, .. }
            | Axis::Transform { component, .. } => *component,
            Axis::MixtureWeights { .. } => None,
        }
    }

    fn label(&self, k: usize) -> String {
        let prefix = self.component().map_or(String::new(), |c| format!("c{c}."));
        match self {
            Axis::Gamma { values, .. } => format!("{prefix}gamma={}", values[k]),
            Axis::Lambda { values, .. } => format!("{prefix}lambda={}", values[k]),
            Axis::Weight { dim, values, .. } => format!("{prefix}w{dim}={}", values[k]),
            Axis::AllWeights { values, .. } => format!("{prefix}w={}", values[k]),
            Axis::Shrinkage { vars, values, .. } => format!("{prefix}b{vars:?}={}", values[k]),
            Axis::Transform { values, .. } => format!("{prefix}transform={:?}", values[k]),
            Axis::MixtureWeights { values } => format!("c={:?}", values[k]),
        }
    }

    /// Writes grid value `k` into `cfg`.
    fn apply(&self, k: usize, cfg: &mut EstimatorConfig) -> Result<()> {
        if let Axis::MixtureWeights { values } = self {
            let EstimatorConfig::Mixture { components } = cfg else {
                return Err(Error::Config("mixture_weights axis needs a mixture config".into()));
            };
            if values[k].len() != components.len() {
                return Err(Error::Config(format!(
                    "mixture weight vector has {} entries for {} components",
                    values[k].len(),
                    components.len()
                )));
            }
            for (c, w) in components.iter_mut().zip(&values[k]) {
                c.weight = *w;
            }
            return Ok(());
        }
        let target = match (self.component(), cfg) {
            (None, EstimatorConfig::Mixture { .. }) => {
                return Err(Error::Config("axes on a mixture need a 1-based `component`".into()))
            }
            (None, cfg) => cfg,
            (Some(c), EstimatorConfig::Mixture { components }) => {
                let len = components.len();
                let MixtureComponent { config, .. } = components
                    .get_mut(c.wrapping_sub(1))
                    .ok_or_else(|| Error::Config(format!("component {c} not in 1..={len}")))?;
                config
            }
            (Some(_), _) => return Err(Error::Config("`component` is only valid for mixtures".into())),
        };
        set_param(self, k, target)
    }
}

fn set_param(axis: &Axis, k: usize, cfg: &mut EstimatorConfig) -> Result<()> {
    let mismatch = Error::Config(format!(
        "axis `{}` does not apply to a {} config",
        axis.label(k),
        cfg.variant_name()
    ));
    match (axis, &mut *cfg) {
        (Axis::Gamma { values, .. }, EstimatorConfig::Waak { gamma, .. })
        | (
            Axis::Gamma { values, .. },
            EstimatorConfig::Transformed {
                transform: Transform::Exponential { gamma } | Transform::Logistic { gamma },
                ..
            },
        ) => *gamma = values[k],
        (Axis::Lambda { values, .. }, EstimatorConfig::AaClassic { lambda, .. }) => *lambda = values[k],
        (Axis::Weight { dim, values, .. }, EstimatorConfig::Waak { weights: w, .. })
        | (
            Axis::Weight { dim, values, .. },
            EstimatorConfig::Transformed {
                shrinkage: ShrinkageSpec::SingleInteraction { w },
                ..
            },
        ) => {
            let len = w.len();
            *w.get_mut(dim.wrapping_sub(1))
                .ok_or_else(|| Error::Config(format!("weight index {dim} not in 1..={len}")))? = values[k];
        }
        (Axis::AllWeights { values, .. }, EstimatorConfig::Waak { weights: w, .. })
        | (
            Axis::AllWeights { values, .. },
            EstimatorConfig::Transformed {
                shrinkage: ShrinkageSpec::SingleInteraction { w },
                ..
            },
        ) => w.iter_mut().for_each(|x| *x = values[k]),
        (Axis::Shrinkage { vars, values, .. }, EstimatorConfig::Linear { shrinkage })
        | (Axis::Shrinkage { vars, values, .. }, EstimatorConfig::Transformed { shrinkage, .. }) => {
            let ShrinkageSpec::Sparse { entries, .. } = shrinkage else {
                return Err(Error::Config("shrinkage axes need a sparse shrinkage vector".into()));
            };
            let key = SparseEntry::new(vars.clone(), values[k]);
            match entries.iter_mut().find(|e| e.vars == key.vars) {
                Some(e) => e.value = values[k],
                None => entries.push(key),
            }
        }
        (Axis::Transform { values, .. }, EstimatorConfig::Transformed { transform, .. }) => *transform = values[k],
        _ => return Err(mismatch),
    }
    Ok(())
}

/// A base config and the axes varied around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub base: EstimatorConfig,
    #[serde(default)]
    pub axes: Vec<Axis>,
    /// Maximum number of grid points evaluated.
    #[serde(default)]
    pub budget: Option<usize>,
}

/// A grid point: its config and a readable label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: String,
    pub config: EstimatorConfig,
}

impl SearchSpace {
    pub fn new(base: EstimatorConfig, axes: Vec<Axis>) -> Self {
        Self {
            base,
            axes,
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    /// Every grid point in lexicographic order (the last axis varies
    /// fastest), each validated.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        if self.axes.iter().any(Axis::is_empty) {
            return Err(Error::Config("search space has an empty axis".into()));
        }
        let mut idx = vec![0usize; self.axes.len()];
        let mut out = Vec::with_capacity(self.size());
        loop {
            let mut config = self.base.clone();
            let mut labels = Vec::with_capacity(self.axes.len());
            for (axis, &k) in self.axes.iter().zip(&idx) {
                axis.apply(k, &mut config)?;
                labels.push(axis.label(k));
            }
            config.validate().map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("grid point {}: {m}", labels.join(", "))),
                other => other,
            })?;
            out.push(GridPoint {
                label: if labels.is_empty() {
                    "base".into()
                } else {
                    labels.join(", ")
                },
                config,
            });
            // odometer increment
            let mut d = self.axes.len();
            loop {
                if d == 0 {
                    return Ok(out);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub label: String,
    #[serde(with = "crate::cross_validation::float")]
    pub value: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: EstimatorConfig,
    pub best_label: String,
    pub report: RiskReport,
    /// Every evaluated point, in grid order.
    pub table: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("search budget of {budget} evaluations exceeded by a grid of {grid_size} points")]
    BudgetExceeded {
        budget: usize,
        grid_size: usize,
        /// Best of the points evaluated before the budget ran out.
        best_so_far: Option<Box<SearchOutcome>>,
    },
    #[error(transparent)]
    Failed(#[from] Error),
}

/// Exhaustive search; the first of tied grid points wins.
pub fn grid_search(
    space: &SearchSpace,
    loss: LossKind,
    counts: &CountsVector,
    opts: CvOptions,
) -> std::result::Result<SearchOutcome, SearchError> {
    let points = space.points()?;
    let budget = space.budget.unwrap_or(usize::MAX);
    let mut best: Option<(usize, RiskReport)> = None;
    let mut table = Vec::with_capacity(points.len().min(budget));
    for (k, point) in points.iter().enumerate().take(budget) {
        let est = point.config.build()?;
        let report = risk(loss, &est, counts, opts)?;
        table.push(GridRow {
            label: point.label.clone(),
            value: report.value,
            dominated: report.dominated,
        });
        let better = match &best {
            None => true,
            Some((_, b)) => report.score() < b.score(),
        };
        if better {
            best = Some((k, report));
        }
    }
    let outcome = best.map(|(k, report)| SearchOutcome {
        best: points[k].config.clone(),
        best_label: points[k].label.clone(),
        report,
        table,
    });
    if points.len() > budget {
        return Err(SearchError::BudgetExceeded {
            budget,
            grid_size: points.len(),
            best_so_far: outcome.map(Box::new),
        });
    }
    Ok(outcome.expect("grid has at least one point"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub weights: Vec<f64>,
    pub gamma: f64,
    pub report: RiskReport,
    pub sweeps_run: usize,
    pub evaluations: usize,
    /// Score after each accepted step, starting with the initial weights.
    #[serde(with = "crate::cross_validation::float::vec")]
    pub history: Vec<f64>,
}

/// Cyclic coordinate descent on the WAAK weights over a shared per-axis grid.
///
/// A move is accepted only on strict improvement, so the score never
/// increases. Stops after `sweeps` passes or a pass with no accepted move.
pub fn coordinate_descent_w(
    initial: &[f64],
    gamma: f64,
    loss: LossKind,
    counts: &CountsVector,
    sweeps: usize,
    grid: &[f64],
    opts: CvOptions,
) -> Result<DescentOutcome> {
    if sweeps == 0 {
        return Err(Error::Config("coordinate descent needs sweeps >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::Config("coordinate descent needs a nonempty weight grid".into()));
    }
    let eval = |w: &[f64]| -> Result<RiskReport> {
        let est = EstimatorConfig::waak(w.to_vec(), gamma).build()?;
        risk(loss, &est, counts, opts)
    };
    // validate everything up front
    EstimatorConfig::waak(initial.to_vec(), gamma).validate()?;
    for &v in grid {
        EstimatorConfig::waak(vec![v], gamma).validate()?;
    }

    let mut w = initial.to_vec();
    let mut report = eval(&w)?;
    let mut history = vec![report.score()];
    let mut evaluations = 1;
    let mut sweeps_run = 0;
    for _ in 0..sweeps {
        sweeps_run += 1;
        let mut improved = false;
        for d in 0..w.len() {
            for &v in grid {
                if v == w[d] {
                    continue;
                }
                let mut trial = w.clone();
                trial[d] = v;
                let r = eval(&trial)?;
                evaluations += 1;
                if r.score() < report.score() {
                    w = trial;
                    report = r;
                    history.push(report.score());
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(DescentOutcome {
        weights: w,
        gamma,
        report,
        sweeps_run,
        evaluations,
        history,
    })
}
