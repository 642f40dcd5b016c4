//! Expected value of a binary response given the other coordinates.

use hypercube_density::estimators::{estimate_at, CountsVector, EstimatorConfig};
use hypercube_density::synth::Planted;
use hypercube_density::CellIndex;

fn main() -> hypercube_density::Result<()> {
    // x1 tends to agree with x2
    let model = Planted::Clusters {
        prototypes: vec!["++---".into(), "--+-+".into()],
        flip: vec![0.15, 0.15, 0.3, 0.3, 0.3],
    };
    let points = model.sample(100, 11)?;
    let counts = CountsVector::from_observations(&points)?;
    let est = EstimatorConfig::waak(vec![1.0, 1.0, 0.5, 0.5, 0.5], 2.0).build()?;

    let n = 5;
    for given in ["?+---", "?--+-", "?-+-+"] {
        let plus = CellIndex::parse(&given.replacen('?', "+", 1), n)?;
        let minus = plus.product(&CellIndex::from_vars(n, &[1])?)?;
        let p = estimate_at(&[plus, minus], &est, &counts)?.values;
        let e = (p[0] - p[1]) / (p[0] + p[1]);
        println!("E[X1 | x2..x5 = {}] = {e:+.4}", &given[1..]);
    }
    Ok(())
}
