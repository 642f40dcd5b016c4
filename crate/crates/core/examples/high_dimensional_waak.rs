//! Weighted AA kernel estimates at n = 10 000 without any dense table.
//!
//! Single-cell probabilities underflow at this size, so densities are
//! reported on the log scale.

use std::time::Instant;

use hypercube_density::estimators::{ln_element_waak, CountsVector, EstimatorConfig};
use hypercube_density::synth::Planted;
use hypercube_density::walsh::index_of_point;
use hypercube_density::CellIndex;

fn ln_density(x: &CellIndex, counts: &CountsVector, weights: &[f64], gamma: f64) -> hypercube_density::Result<f64> {
    let terms = counts
        .iter()
        .map(|(c, k)| Ok((k as f64).ln() + ln_element_waak(x, c, weights, gamma)?))
        .collect::<hypercube_density::Result<Vec<f64>>>()?;
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln() - (counts.total() as f64).ln())
}

fn main() -> hypercube_density::Result<()> {
    let n = 10_000;
    let means: Vec<f64> = (0..n).map(|d| if d < 20 { 0.6 } else { 0.0 }).collect();
    let points = Planted::Product { means }.sample(200, 1)?;
    let counts = CountsVector::from_observations(&points)?;

    let weights: Vec<f64> = (0..n).map(|d| if d < 20 { 1.0 } else { 0.02 }).collect();
    let t = Instant::now();
    let est = EstimatorConfig::waak(weights.clone(), 3.0).build()?;
    println!(
        "built in {:?}; ln Z = {:.3}",
        t.elapsed(),
        est.normalizers()[0].ln_value
    );

    let seen = index_of_point(&points[0]);
    let unseen = seen.product(&CellIndex::from_vars(n, &(1..=20).collect::<Vec<_>>())?)?;
    let t = Instant::now();
    let a = ln_density(&seen, &counts, &weights, 3.0)?;
    let b = ln_density(&unseen, &counts, &weights, 3.0)?;
    println!("2 cells x 200 observations in {:?}", t.elapsed());
    println!("  ln p(observed cell)              = {a:.3}");
    println!("  ln p(same cell, x1..x20 flipped) = {b:.3}");
    println!("  ratio = {:.3e}", (a - b).exp());

    let t = Instant::now();
    let e = est.element(&seen, &unseen)?;
    println!("single element {e:.3e} in {:?}", t.elapsed());
    Ok(())
}
