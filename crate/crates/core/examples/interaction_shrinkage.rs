//! Interaction-order index sets, sparse low-order shrinkage and the
//! square-error optimal shrinkage factor.

use hypercube_density::estimators::{
    estimate_full, shrinkage_optimal, CountsVector, EstimatorConfig, ShrinkageSpec, SparseEntry,
};
use hypercube_density::walsh::{interaction_indexes, low_order_count};
use hypercube_density::HypercubePoint;

fn main() -> hypercube_density::Result<()> {
    let n = 5;
    for k in 0..=n {
        let set = interaction_indexes(n, k)?;
        let shown: Vec<u64> = set.members.iter().take(6).map(|c| c.get().unwrap()).collect();
        println!("S_{k}: {} members, first {shown:?}", set.len());
    }
    println!("coefficients of order <= 3 at n = 50: {}", low_order_count(50, 3));

    for (q, samples) in [(0.0, 10), (0.3, 5), (0.7, 10), (0.9, 50), (1.0, 3)] {
        println!("b*(q = {q}, N = {samples}) = {:.4}", shrinkage_optimal(q, samples)?);
    }

    // shrink each first- and second-order coefficient by its plug-in optimum
    let points: Vec<HypercubePoint> = ["+++++", "++-++", "+++-+", "-++++", "++++-", "+-+++", "+++++"]
        .iter()
        .map(|r| HypercubePoint::parse_signs(r))
        .collect::<Result<_, _>>()?;
    let counts = CountsVector::from_observations(&points)?;
    let total = counts.total();
    let mut entries = Vec::new();
    for k in 1..=2 {
        for c in interaction_indexes(n, k)?.members {
            let vars = c.set_bits();
            let mean: f64 = points
                .iter()
                .map(|p| vars.iter().map(|&v| p.entries()[v] as f64).product::<f64>())
                .sum::<f64>()
                / total as f64;
            entries.push(SparseEntry::new(
                vars.iter().map(|v| v + 1).collect(),
                shrinkage_optimal(mean.clamp(-1.0, 1.0), total)?,
            ));
        }
    }
    let est = EstimatorConfig::Linear {
        shrinkage: ShrinkageSpec::Sparse { n, entries },
    }
    .build()?;
    let p = estimate_full(&est, &counts)?;
    println!("p(+++++) = {:.4}, negative entries: {}", p.values[0], p.negative);
    Ok(())
}
