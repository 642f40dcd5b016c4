//! Cells, Walsh entries, the product mapping and the fast transform.

use hypercube_density::walsh::{fwht, point_of_index, product_index, walsh_entry, xor_convolve};
use hypercube_density::{CellIndex, HypercubePoint};

fn main() -> hypercube_density::Result<()> {
    let n = 3;
    println!("W^({n}):");
    for r in 1..=8 {
        let row: Vec<String> = (1..=8)
            .map(|c| format!("{:>2}", walsh_entry(r, c, n).unwrap()))
            .collect();
        println!("  {}", row.join(" "));
    }

    // bit k-1 of j-1 is set exactly when x_k = -1
    let x = HypercubePoint::parse_signs("+-+")?;
    let j = hypercube_density::walsh::index_of_point(&x);
    println!("{} -> cell {}", x.to_sign_string(), j.get().unwrap());
    println!("cell 6 -> {}", point_of_index(6, n)?.to_sign_string());

    println!("M[2, 3] = {}", product_index(2, 3, n)?);
    let a = CellIndex::parse("-++", n)?;
    let b = CellIndex::parse("--+", n)?;
    println!(
        "{} * {} = {}",
        a.to_sign_string(),
        b.to_sign_string(),
        a.product(&b)?.to_sign_string()
    );

    let v = [1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 0.0, 3.0];
    println!("W v = {:?}", fwht(&v)?);
    let delta = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    println!("v xor-shifted by 1 = {:?}", xor_convolve(&v, &delta)?);

    // cells work at any n through multiword indexes
    let big = CellIndex::from_vars(5000, &[1, 4096, 5000])?;
    println!("n = 5000 cell has order {}", big.order());
    Ok(())
}
