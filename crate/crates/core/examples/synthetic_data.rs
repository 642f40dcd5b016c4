//! Seeded synthetic data with known probabilities.

use hypercube_density::cli::data::{format_observations, DataFormat, Encoding};
use hypercube_density::estimators::CountsVector;
use hypercube_density::synth::Planted;
use hypercube_density::walsh::index_of_point;

fn main() -> hypercube_density::Result<()> {
    let model = Planted::SingleInteraction {
        coefficients: vec![0.4, -0.2, 0.1],
    };
    let points = model.sample(10_000, 5)?;
    let counts = CountsVector::from_observations(&points)?;
    for (cell, c) in counts.iter() {
        println!(
            "{}  empirical {:.4}  true {:.4}",
            cell.to_sign_string(),
            c as f64 / counts.total() as f64,
            model.probability(cell)?
        );
    }
    assert_eq!(points, model.sample(10_000, 5)?);

    let bits = DataFormat {
        encoding: Encoding::Bits,
        ..DataFormat::default()
    };
    print!("first rows as bits:\n{}", format_observations(&points[..3], &bits));
    println!("first cell index: {}", index_of_point(&points[0]).get().unwrap());
    Ok(())
}
