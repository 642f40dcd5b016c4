use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cli::report::{to_json, write_atomic, SCHEMA_VERSION};
use crate::cli::BenchArgs;
use crate::error::{Result, MAX_DENSE_DIM};
use crate::estimators::{EstimatorConfig, ShrinkageSpec, SparseEntry};
use crate::transforms::{normalizer, Transform};
use crate::walsh::CellIndex;

/// Dimensions beyond any dense limit, for the `O(n)` and `O(b)` rows.
const LARGE_DIMS: [usize; 3] = [100, 1_000, 10_000];
const DENSE_DIMS: [usize; 4] = [8, 12, 16, 20];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub regime: String,
    pub quantity: String,
    pub n: usize,
    pub ns_per_op: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub regime: String,
    pub quantity: String,
    pub from_n: usize,
    pub to_n: usize,
    pub measured_ratio: f64,
    pub predicted_ratio: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub command: String,
    pub max_n: usize,
    pub rows: Vec<BenchRow>,
    pub scaling: Vec<ScalingCheck>,
}

/// Median time per call over five batches, each long enough to measure.
fn time_ns(target: Duration, mut f: impl FnMut()) -> f64 {
    let mut reps = 1u64;
    loop {
        let t = Instant::now();
        for _ in 0..reps {
            f();
        }
        if t.elapsed() >= target || reps >= 1 << 30 {
            break;
        }
        reps *= 2;
    }
    let mut samples: Vec<f64> = (0..5)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..reps {
                f();
            }
            t.elapsed().as_nanos() as f64 / reps as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[2]
}

fn random_pairs(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(CellIndex, CellIndex)> {
    let cell = |rng: &mut ChaCha8Rng| {
        let vars: Vec<usize> = (1..=n).filter(|_| rng.random::<bool>()).collect();
        CellIndex::from_vars(n, &vars).expect("vars in range")
    };
    (0..count).map(|_| (cell(rng), cell(rng))).collect()
}

struct Bencher {
    target: Duration,
    rows: Vec<BenchRow>,
    rng: ChaCha8Rng,
}

impl Bencher {
    fn push(&mut self, regime: &str, quantity: &str, n: usize, ns: f64) {
        self.rows.push(BenchRow {
            regime: regime.into(),
            quantity: quantity.into(),
            n,
            ns_per_op: ns,
        });
    }

    fn elements(&mut self, regime: &str, cfg: &EstimatorConfig, squared: bool) -> Result<()> {
        let n = cfg.dim()?;
        let est = cfg.build()?;
        let pairs = random_pairs(n, 64, &mut self.rng);
        let mut k = 0;
        let ns = time_ns(self.target, || {
            let (a, b) = &pairs[k % pairs.len()];
            black_box(est.element(a, b).expect("valid pair"));
            k += 1;
        });
        self.push(regime, "element", n, ns);
        if squared {
            est.squared_element(&pairs[0].0, &pairs[0].1)?;
            let ns = time_ns(self.target, || {
                let (a, b) = &pairs[k % pairs.len()];
                black_box(est.squared_element(a, b).expect("valid pair"));
                k += 1;
            });
            self.push(regime, "squared_element", n, ns);
        }
        Ok(())
    }

    fn normalizer(&mut self, regime: &str, t: &Transform, b: &ShrinkageSpec) -> Result<()> {
        let n = b.dim()?;
        normalizer(t, b)?;
        let ns = time_ns(self.target, || {
            black_box(normalizer(t, b).expect("valid config"));
        });
        self.push(regime, "normalizer", n, ns);
        Ok(())
    }

    fn ns(&self, regime: &str, quantity: &str, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.regime == regime && r.quantity == quantity && r.n == n)
            .map(|r| r.ns_per_op)
    }
}

fn sparse_b(n: usize) -> ShrinkageSpec {
    ShrinkageSpec::Sparse {
        n,
        entries: vec![
            SparseEntry::new(vec![], 1.0),
            SparseEntry::new(vec![1], 0.8),
            SparseEntry::new(vec![2], 0.6),
            SparseEntry::new(vec![1, 3], 0.4),
            SparseEntry::new(vec![2, 4, 5], 0.2),
        ],
    }
}

fn weights(n: usize) -> Vec<f64> {
    (0..n).map(|d| 0.2 + 0.6 * (d % 7) as f64 / 6.0).collect()
}

pub fn run(args: &BenchArgs) -> Result<String> {
    let max_n = args.max_n.min(MAX_DENSE_DIM);
    let mut b = Bencher {
        target: Duration::from_millis(if args.quick { 1 } else { 20 }),
        rows: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(0),
    };
    let dense: Vec<usize> = DENSE_DIMS.iter().copied().filter(|&n| n <= max_n).collect();
    let all: Vec<usize> = dense.iter().chain(&LARGE_DIMS).copied().collect();

    // row 1: linear, sparse b
    for &n in &all {
        let spec = sparse_b(n);
        b.normalizer("linear_sparse_b", &Transform::Identity, &spec)?;
        b.elements("linear_sparse_b", &EstimatorConfig::Linear { shrinkage: spec }, true)?;
    }
    // row 2: exponential of b_w (weighted AA kernel)
    for &n in &all {
        let w = weights(n);
        let t = Transform::Exponential { gamma: 2.0 };
        b.normalizer("exponential_b_w", &t, &ShrinkageSpec::single_interaction(w.clone()))?;
        b.elements("exponential_b_w", &EstimatorConfig::waak(w, 2.0), true)?;
    }
    // row 3: logistic of b_w; Q^2 needs the dense table
    for &n in &all {
        let spec = ShrinkageSpec::single_interaction(weights(n));
        let t = Transform::Logistic { gamma: 2.0 };
        b.normalizer("logistic_b_w", &t, &spec)?;
        let cfg = EstimatorConfig::Transformed {
            shrinkage: spec,
            transform: t,
        };
        b.elements("logistic_b_w", &cfg, n <= max_n)?;
    }
    // row 4: general transform of a dense b
    for &n in &dense {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut values: Vec<f64> = (0..1usize << n).map(|_| rng.random()).collect();
        values[0] = 1.0;
        let spec = ShrinkageSpec::Dense { values };
        b.normalizer("general", &Transform::Relu, &spec)?;
        let cfg = EstimatorConfig::Transformed {
            shrinkage: spec,
            transform: Transform::Relu,
        };
        b.elements("general", &cfg, true)?;
    }

    let mut scaling = Vec::new();
    let mut check = |regime: &str, quantity: &str, ns: &[usize], predicted: &dyn Fn(usize, usize) -> f64| {
        for w in ns.windows(2) {
            let (Some(a), Some(c)) = (b.ns(regime, quantity, w[0]), b.ns(regime, quantity, w[1])) else {
                continue;
            };
            let measured = c / a;
            let p = predicted(w[0], w[1]);
            scaling.push(ScalingCheck {
                regime: regime.into(),
                quantity: quantity.into(),
                from_n: w[0],
                to_n: w[1],
                measured_ratio: measured,
                predicted_ratio: p,
                // growth within a factor of four of the predicted class
                consistent: measured <= 4.0 * p && measured >= p / 4.0,
            });
        }
    };
    let constant = |_: usize, _: usize| 1.0;
    let linear = |a: usize, c: usize| c as f64 / a as f64;
    let n_2n = |a: usize, c: usize| (c as f64 * (1u64 << c) as f64) / (a as f64 * (1u64 << a) as f64);
    check("linear_sparse_b", "element", &LARGE_DIMS, &constant);
    check("exponential_b_w", "element", &LARGE_DIMS, &linear);
    check("exponential_b_w", "normalizer", &LARGE_DIMS, &linear);
    check("exponential_b_w", "squared_element", &LARGE_DIMS, &linear);
    check("general", "normalizer", &dense, &n_2n);

    let report = BenchReport {
        schema_version: SCHEMA_VERSION,
        command: "bench".into(),
        max_n,
        rows: b.rows,
        scaling,
    };
    write_atomic(&args.out, &to_json(&report)?)?;

    let mut s = format!("bench -> {}\n", args.out.display());
    s.push_str(&format!(
        "  {:<18} {:<16} {:>6} {:>14}\n",
        "regime", "quantity", "n", "ns/op"
    ));
    for r in &report.rows {
        s.push_str(&format!(
            "  {:<18} {:<16} {:>6} {:>14.1}\n",
            r.regime, r.quantity, r.n, r.ns_per_op
        ));
    }
    s.push_str("  scaling (measured vs predicted growth):\n");
    for c in &report.scaling {
        s.push_str(&format!(
            "  {:<18} {:<16} {:>5} -> {:<6} {:>9.2} vs {:>9.2}  {}\n",
            c.regime,
            c.quantity,
            c.from_n,
            c.to_n,
            c.measured_ratio,
            c.predicted_ratio,
            if c.consistent { "ok" } else { "off" }
        ));
    }
    Ok(s)
}
