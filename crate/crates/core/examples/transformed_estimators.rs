//! Linear and transformed Fourier-Walsh estimators and their normalizers.

use hypercube_density::estimators::{estimate_full, CountsVector, EstimatorConfig, ShrinkageSpec};
use hypercube_density::transforms::normalizer;
use hypercube_density::{HypercubePoint, Transform};

fn main() -> hypercube_density::Result<()> {
    let rows = ["+++", "++-", "+++", "-+-", "+-+", "+++"];
    let points: Vec<HypercubePoint> = rows
        .iter()
        .map(|r| HypercubePoint::parse_signs(r))
        .collect::<Result<_, _>>()?;
    let counts = CountsVector::from_observations(&points)?;

    let b = ShrinkageSpec::Dense {
        values: vec![1.0, 0.8, 0.6, 0.3, 0.7, 0.2, 0.2, 0.05],
    };
    let transforms = [
        Transform::Identity,
        Transform::Exponential { gamma: 2.0 },
        Transform::Logistic { gamma: 3.0 },
        Transform::Step {
            threshold: 1.0,
            low: 0.1,
            high: 1.0,
        },
        Transform::Relu,
        Transform::Elu { alpha: 0.5 },
    ];
    for t in transforms {
        let z = normalizer(&t, &b)?;
        let est = EstimatorConfig::Transformed {
            shrinkage: b.clone(),
            transform: t,
        }
        .build()?;
        let p = estimate_full(&est, &counts)?;
        let sum: f64 = p.values.iter().sum();
        println!(
            "{:<12} Z = {:>10.4} ({:?})  p(+++) = {:.4}  sum = {:.12}  negative: {}",
            t.name(),
            z.value,
            z.method,
            p.values[0],
            sum,
            p.negative
        );
    }

    // closed forms for b_w
    let bw = ShrinkageSpec::single_interaction(vec![1.0, 0.5, 0.25]);
    for t in [
        Transform::Logistic { gamma: 3.0 },
        Transform::Exponential { gamma: 3.0 },
    ] {
        let z = normalizer(&t, &bw)?;
        println!("b_w {:<12} Z = {:.6} ({:?})", t.name(), z.value, z.method);
    }
    Ok(())
}
