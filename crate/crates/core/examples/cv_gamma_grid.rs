//! Leave-one-out selection of the AA smoothing parameter on planted data.

use hypercube_density::cross_validation::{grid_search, Axis, CvOptions, LossKind, SearchSpace};
use hypercube_density::estimators::{CountsVector, EstimatorConfig};
use hypercube_density::synth::Planted;

fn main() -> hypercube_density::Result<()> {
    let n = 8;
    let planted = Planted::SingleInteraction {
        coefficients: vec![0.35, -0.3, 0.2, 0.0, 0.0, 0.0, 0.1, 0.0],
    };
    let points = planted.sample(60, 42)?;
    let counts = CountsVector::from_observations(&points)?;

    let space = SearchSpace::new(
        EstimatorConfig::waak(vec![1.0; n], 2.0),
        vec![Axis::Gamma {
            values: vec![1.0, 1.25, 1.5, 2.0, 3.0, 5.0],
            component: None,
        }],
    );
    for loss in [LossKind::Kl, LossKind::Se] {
        let out = grid_search(&space, loss, &counts, CvOptions::with_threads(4)).map_err(|e| match e {
            hypercube_density::cross_validation::SearchError::Failed(e) => e,
            other => hypercube_density::Error::Config(other.to_string()),
        })?;
        println!("{loss:?}:");
        for row in &out.table {
            let mark = if row.label == out.best_label { "*" } else { " " };
            println!(
                "  {mark} {:<12} {:>14.6}{}",
                row.label,
                row.value,
                if row.dominated { " (dominated)" } else { "" }
            );
        }
        println!(
            "  {} element and {} squared-element evaluations",
            out.report.element_evaluations, out.report.squared_element_evaluations
        );
    }
    Ok(())
}
