//! Dense reference computations built directly from definitions.
//!
//! Nothing here calls the library's algebra: the Walsh matrix comes from
//! the block recursion, estimators are formed by explicit matrix products
//! and transforms are re-implemented from their formulas.

#![allow(dead_code)]

use hypercube_density::{EstimatorConfig, ShrinkageSpec, Transform};

pub type Matrix = Vec<Vec<f64>>;

/// `W^(n)` from `W^(n+1) = [[W, W], [W, -W]]`, `W^(0) = [1]`.
pub fn walsh(n: usize) -> Vec<Vec<i32>> {
    let mut w = vec![vec![1i32]];
    for _ in 0..n {
        let m = w.len();
        let mut next = vec![vec![0i32; 2 * m]; 2 * m];
        for r in 0..m {
            for c in 0..m {
                next[r][c] = w[r][c];
                next[r][c + m] = w[r][c];
                next[r + m][c] = w[r][c];
                next[r + m][c + m] = -w[r][c];
            }
        }
        w = next;
    }
    w
}

/// `M^(n)` (1-based entries) from the block recursion
/// `[[M, 2^n J + M], [2^n J + M, M]]`, `M^(0) = [1]`.
pub fn mapping(n: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![1u64]];
    for _ in 0..n {
        let s = m.len();
        let mut next = vec![vec![0u64; 2 * s]; 2 * s];
        for r in 0..s {
            for c in 0..s {
                next[r][c] = m[r][c];
                next[r][c + s] = s as u64 + m[r][c];
                next[r + s][c] = s as u64 + m[r][c];
                next[r + s][c + s] = m[r][c];
            }
        }
        m = next;
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * bk[j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `W diag(b) W`.
pub fn diagonalization(b: &[f64]) -> Matrix {
    let n = b.len().trailing_zeros() as usize;
    let w = walsh(n);
    let size = b.len();
    let mut out = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            out[i][j] = (0..size).map(|k| b[k] * (w[i][k] * w[j][k]) as f64).sum();
        }
    }
    out
}

pub fn transform(t: &Transform, x: f64) -> f64 {
    match *t {
        Transform::Identity => x,
        Transform::Exponential { gamma } => gamma.powf(x),
        Transform::Logistic { gamma } => 1.0 / (1.0 + gamma.powf(-x)),
        Transform::Step { threshold, low, high } => {
            if x >= threshold {
                high
            } else {
                low
            }
        }
        Transform::Relu => {
            if x > 0.0 {
                x
            } else {
                0.0
            }
        }
        Transform::Tanh { scale } => (scale * x).tanh(),
        Transform::Elu { alpha } => {
            if x > 0.0 {
                x
            } else {
                alpha * (x.exp() - 1.0)
            }
        }
    }
}

/// Zero-based coefficient index of a product of 1-based variables.
pub fn coefficient(vars: &[usize]) -> usize {
    vars.iter().map(|v| 1usize << (v - 1)).sum()
}

/// The shrinkage vector as `2^n` numbers; `b_1` is left as given.
pub fn dense_b(spec: &ShrinkageSpec) -> Vec<f64> {
    match spec {
        ShrinkageSpec::Dense { values } => values.clone(),
        ShrinkageSpec::Sparse { n, entries } => {
            let mut b = vec![0.0; 1 << n];
            for e in entries {
                b[coefficient(&e.vars)] = e.value;
            }
            b
        }
        ShrinkageSpec::SingleInteraction { w } => {
            let mut b = vec![0.0; 1 << w.len()];
            for (k, &wk) in w.iter().enumerate() {
                b[1 << k] = wk;
            }
            b
        }
    }
}

/// `f(W diag(b) W)` scaled so that every row sums to one.
pub fn transformed_q(b: &[f64], t: &Transform) -> Matrix {
    let mut q = diagonalization(b);
    for row in q.iter_mut() {
        for v in row.iter_mut() {
            *v = transform(t, *v);
        }
    }
    let z: f64 = q[0].iter().sum();
    for row in q.iter_mut() {
        for v in row.iter_mut() {
            *v /= z;
        }
    }
    q
}

/// Row sum of `f(W diag(b) W)`, unnormalized.
pub fn transformed_z(b: &[f64], t: &Transform) -> f64 {
    // row 1 of W diag(b) W is W b since W[1, k] = 1
    let w = walsh(b.len().trailing_zeros() as usize);
    w.iter()
        .map(|row| {
            let v: f64 = row.iter().zip(b).map(|(&s, x)| s as f64 * x).sum();
            transform(t, v)
        })
        .sum()
}

fn hamming(a: usize, b: usize) -> i32 {
    (a ^ b).count_ones() as i32
}

/// The estimator matrix `Q` of a config, built densely.
pub fn dense_q(config: &EstimatorConfig) -> Matrix {
    match config {
        EstimatorConfig::Linear { shrinkage } => {
            let mut b = dense_b(shrinkage);
            if !matches!(shrinkage, ShrinkageSpec::Dense { .. }) {
                b[0] = 1.0;
            }
            let scale = b.len() as f64;
            diagonalization(&b)
                .into_iter()
                .map(|row| row.into_iter().map(|v| v / scale).collect())
                .collect()
        }
        EstimatorConfig::Transformed { shrinkage, transform } => transformed_q(&dense_b(shrinkage), transform),
        EstimatorConfig::Waak { weights, gamma } => transformed_q(
            &dense_b(&ShrinkageSpec::SingleInteraction { w: weights.clone() }),
            &Transform::Exponential { gamma: *gamma },
        ),
        EstimatorConfig::AaClassic { n, lambda } => {
            let size = 1usize << n;
            (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| {
                            let d = hamming(i, j);
                            lambda.powi(*n as i32 - d) * (1.0 - lambda).powi(d)
                        })
                        .collect()
                })
                .collect()
        }
        EstimatorConfig::Mixture { components } => {
            let mut acc: Option<Matrix> = None;
            for c in components {
                let q = dense_q(&c.config);
                match acc.as_mut() {
                    None => {
                        acc = Some(
                            q.into_iter()
                                .map(|r| r.into_iter().map(|v| c.weight * v).collect())
                                .collect(),
                        )
                    }
                    Some(a) => {
                        for (ra, rq) in a.iter_mut().zip(q) {
                            for (x, y) in ra.iter_mut().zip(rq) {
                                *x += c.weight * y;
                            }
                        }
                    }
                }
            }
            acc.expect("nonempty mixture")
        }
    }
}

/// Empirical distribution over `2^n` cells from zero-based cell numbers.
pub fn frequencies(n: usize, cells: &[usize]) -> Vec<f64> {
    let mut p = vec![0.0; 1 << n];
    for &c in cells {
        p[c] += 1.0;
    }
    let total = cells.len() as f64;
    p.iter_mut().for_each(|v| *v /= total);
    p
}

/// Leave-one-out estimates `[Q p_{-k}]_{x_k}` by rebuilding the data
/// without observation `k`, for observations sorted by cell.
pub fn loo_rebuild(q: &Matrix, n: usize, cells: &[usize]) -> Vec<f64> {
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    (0..sorted.len())
        .map(|k| {
            let rest: Vec<usize> = sorted
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, &c)| c)
                .collect();
            let p = frequencies(n, &rest);
            matvec(q, &p)[sorted[k]]
        })
        .collect()
}

/// Lower-triangular `L` with `L L' = a`, or `None` if a pivot is not
/// positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().flatten().fold(0.0, |a, &v| a.max(v.abs()))
}
