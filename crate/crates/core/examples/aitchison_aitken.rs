//! The classic Aitchison-Aitken kernel as a weighted kernel with unit weights.

use hypercube_density::estimators::{element_waak, gamma_from_lambda, EstimatorConfig};
use hypercube_density::CellIndex;

fn main() -> hypercube_density::Result<()> {
    let n = 6;
    let lambda = 0.8;
    let gamma = gamma_from_lambda(lambda);
    let classic = EstimatorConfig::aa_classic(n, lambda).build()?;
    let origin = CellIndex::first(n);
    println!("lambda = {lambda}, gamma = {gamma:.6}");
    for d in 0..=n {
        let vars: Vec<usize> = (1..=d).collect();
        let other = CellIndex::from_vars(n, &vars)?;
        let closed = lambda.powi((n - d) as i32) * (1.0 - lambda).powi(d as i32);
        println!(
            "d = {d}: classic {:.8e}  waak(w = 1) {:.8e}  closed form {:.8e}",
            classic.element(&origin, &other)?,
            element_waak(&origin, &other, &vec![1.0; n], gamma)?,
            closed
        );
    }

    // weights below one make a dimension matter less
    let weighted = EstimatorConfig::waak(vec![1.0, 1.0, 1.0, 1.0, 1.0, 0.1], gamma).build()?;
    let flip_last = CellIndex::from_vars(n, &[6])?;
    let flip_first = CellIndex::from_vars(n, &[1])?;
    println!(
        "weighted: Q[o, flip x6] / Q[o, flip x1] = {:.3}",
        weighted.element(&origin, &flip_last)? / weighted.element(&origin, &flip_first)?
    );
    Ok(())
}
