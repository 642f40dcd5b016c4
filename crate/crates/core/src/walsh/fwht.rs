use crate::error::{Error, Result};

/// `log2(len)` for a power-of-two length.
pub fn dim_of_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Shape(format!("length {len} is not a power of two")));
    }
    let dim = len.trailing_zeros() as usize;
    Error::check_dense("fast Walsh-Hadamard transform", dim)?;
    Ok(dim)
}

/// Returns `W v` for the naturally ordered Walsh matrix `W` of matching size.
///
/// Applying it twice multiplies the input by `v.len()`.
pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

pub fn fwht_in_place(data: &mut [f64]) -> Result<()> {
    dim_of_len(data.len())?;
    butterfly(data);
    Ok(())
}

#[inline]
fn butterfly(data: &mut [f64]) {
    let len = data.len();
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(half << 1) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// XOR autocorrelation `r[m] = sum_l g[l] g[l ^ m]`, computed through two
/// transforms.
pub fn xor_autocorrelation(g: &[f64]) -> Result<Vec<f64>> {
    let mut spec = fwht(g)?;
    for s in spec.iter_mut() {
        *s *= *s;
    }
    fwht_in_place(&mut spec)?;
    let scale = 1.0 / g.len() as f64;
    spec.iter_mut().for_each(|s| *s *= scale);
    Ok(spec)
}

/// XOR convolution `c[m] = sum_l a[l] b[l ^ m]`.
pub fn xor_convolve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "convolution lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut fa = fwht(a)?;
    let fb = fwht(b)?;
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    fwht_in_place(&mut fa)?;
    let scale = 1.0 / a.len() as f64;
    fa.iter_mut().for_each(|s| *s *= scale);
    Ok(fa)
}
