//! Convex combinations of separately normalized estimators.

use hypercube_density::estimators::{estimate_full, CountsVector, EstimatorConfig, ShrinkageSpec};
use hypercube_density::{HypercubePoint, Transform};

fn main() -> hypercube_density::Result<()> {
    let points: Vec<HypercubePoint> = ["++++", "+++-", "++--", "++++", "-+++"]
        .iter()
        .map(|r| HypercubePoint::parse_signs(r))
        .collect::<Result<_, _>>()?;
    let counts = CountsVector::from_observations(&points)?;
    let n = 4;

    let smooth = EstimatorConfig::waak(vec![1.0; n], 1.5);
    let sharp = EstimatorConfig::Transformed {
        shrinkage: ShrinkageSpec::single_interaction(vec![1.0, 1.0, 0.5, 0.5]),
        transform: Transform::Logistic { gamma: 4.0 },
    };
    let mix = EstimatorConfig::mixture(vec![(0.3, smooth.clone()), (0.7, sharp.clone())]);

    for (name, cfg) in [("smooth", &smooth), ("sharp", &sharp), ("mixture", &mix)] {
        let est = cfg.build()?;
        let p = estimate_full(&est, &counts)?;
        let top: Vec<String> = p.values.iter().take(4).map(|v| format!("{v:.4}")).collect();
        println!(
            "{name:<8} first cells {}  sum {:.12}",
            top.join(" "),
            p.values.iter().sum::<f64>()
        );
    }

    let est = mix.build()?;
    let (a, b) = (
        hypercube_density::CellIndex::first(n),
        hypercube_density::CellIndex::from_vars(n, &[4])?,
    );
    println!("Q^2 element of the mixture: {:.6e}", est.squared_element(&a, &b)?);
    Ok(())
}
