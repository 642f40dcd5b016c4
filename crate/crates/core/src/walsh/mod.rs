//! Bit-level algebra of naturally ordered Walsh matrices.
//!
//! `W^(n)` is the `2^n x 2^n` matrix `[[1, 1], [1, -1]]^{(x) n}`. Column `j`
//! lists the values of every variable product at the hypercube point encoded
//! by cell `j`, and row `2^(k-1) + 1` holds the values of `X_k` itself.
//!
//! With cells stored as the bits of `j - 1` the three index operations reduce
//! to word-level bit tricks:
//!
//! | operation            | formula                                  |
//! |----------------------|------------------------------------------|
//! | [`walsh_entry`]      | `(-1)^popcount((i-1) & (j-1))`           |
//! | [`product_index`]    | `((i-1) ^ (j-1)) + 1`                    |
//! | [`interaction_indexes`] | `{ j : popcount(j-1) = k }`           |
//!
//! Everything here is integer-exact except the transforms in [`fwht`].

mod cell;
mod fwht;

pub use cell::{index_of_point, point_of_index, CellIndex, HypercubePoint};
pub use fwht::{dim_of_len, fwht, fwht_in_place, xor_autocorrelation, xor_convolve};

use crate::error::{Error, Result};

/// Number of set members allowed in an enumerated interaction set.
const MAX_SET_MEMBERS: u128 = 1 << 30;

fn check_small(j: u64, dim: usize) -> Result<u64> {
    if dim == 0 || dim > 63 {
        return Err(Error::Shape(format!(
            "integer cell indexes need 1 <= n <= 63, got {dim}; use CellIndex"
        )));
    }
    if j == 0 || j > (1u64 << dim) {
        return Err(Error::Range { index: j, dim });
    }
    Ok(j - 1)
}

/// `W^(n)[row, col]` for 1-based indexes.
pub fn walsh_entry(row: u64, col: u64, dim: usize) -> Result<i8> {
    let r = check_small(row, dim)?;
    let c = check_small(col, dim)?;
    Ok(if (r & c).count_ones() % 2 == 0 { 1 } else { -1 })
}

/// Index `m` with `W[:, i] (.) W[:, j] = W[:, m]`.
pub fn product_index(i: u64, j: u64, dim: usize) -> Result<u64> {
    let a = check_small(i, dim)?;
    let b = check_small(j, dim)?;
    Ok((a ^ b) + 1)
}

/// Indexes of the Walsh coefficients that correspond to products of exactly
/// `order` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionIndexSet {
    pub dim: usize,
    pub order: usize,
    pub members: Vec<CellIndex>,
}

impl InteractionIndexSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Members sorted by index. Orders above `n` give the empty set.
pub fn interaction_indexes(dim: usize, order: usize) -> Result<InteractionIndexSet> {
    if dim == 0 {
        return Err(Error::Shape("dimension must be >= 1".into()));
    }
    let count = binomial(dim, order);
    if count > MAX_SET_MEMBERS {
        return Err(Error::Config(format!(
            "interaction set of order {order} at n = {dim} has {count} members, limit is {MAX_SET_MEMBERS}"
        )));
    }
    let mut members = Vec::with_capacity(count as usize);
    if order <= dim {
        let mut vars: Vec<usize> = (1..=order).collect();
        loop {
            members.push(CellIndex::from_vars(dim, &vars)?);
            // advance to the next combination in lexicographic order
            let mut pos = order;
            while pos > 0 && vars[pos - 1] == dim - order + pos {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            vars[pos - 1] += 1;
            for q in pos..order {
                vars[q] = vars[q - 1] + 1;
            }
        }
    }
    members.sort();
    Ok(InteractionIndexSet { dim, order, members })
}

/// Coefficients of interaction order at most `max_order`; equals
/// `(n^3 + 5n + 6) / 6` for `max_order = 3`.
pub fn low_order_count(dim: usize, max_order: usize) -> u128 {
    (0..=max_order.min(dim))
        .map(|k| binomial(dim, k))
        .fold(0u128, |a, b| a.saturating_add(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Dense `W^(n)` from the block recursion `[[W, W], [W, -W]]`.
    fn walsh_recursive(dim: usize) -> Vec<Vec<i32>> {
        let mut w = vec![vec![1]];
        for _ in 0..dim {
            let m = w.len();
            let mut next = vec![vec![0; 2 * m]; 2 * m];
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

    /// Mapping matrix from `M^(n+1) = [[M, 2^n J + M], [2^n J + M, M]]`.
    fn mapping_recursive(dim: usize) -> Vec<Vec<u64>> {
        let mut m = vec![vec![1u64]];
        for level in 0..dim {
            let s = m.len();
            let shift = 1u64 << level;
            let mut next = vec![vec![0u64; 2 * s]; 2 * s];
            for r in 0..s {
                for c in 0..s {
                    next[r][c] = m[r][c];
                    next[r][c + s] = m[r][c] + shift;
                    next[r + s][c] = m[r][c] + shift;
                    next[r + s][c + s] = m[r][c];
                }
            }
            m = next;
        }
        m
    }

    /// Interaction sets from the recursion with set union:
    /// `S^(n+1)_k = S^(n)_k U { x + 2^n : x in S^(n)_{k-1} }`.
    fn interaction_recursive(dim: usize) -> Vec<BTreeSet<u64>> {
        let mut sets: Vec<BTreeSet<u64>> = vec![BTreeSet::from([1])];
        for level in 0..dim {
            let mut next = vec![BTreeSet::new(); level + 2];
            for (k, set) in sets.iter().enumerate() {
                next[k].extend(set.iter().copied());
                next[k + 1].extend(set.iter().map(|x| x + (1u64 << level)));
            }
            sets = next;
        }
        sets
    }

    #[test]
    fn entry_matches_recursion() {
        for dim in 1..=6 {
            let w = walsh_recursive(dim);
            for r in 0..w.len() {
                for c in 0..w.len() {
                    let e = walsh_entry(r as u64 + 1, c as u64 + 1, dim).unwrap();
                    assert_eq!(e as i32, w[r][c]);
                }
            }
        }
        assert_eq!(walsh_entry(3, 3, 2).unwrap(), -1);
        assert_eq!(walsh_entry(2, 2, 1).unwrap(), -1);
        assert_eq!(walsh_entry(1, 7, 3).unwrap(), 1);
        assert!(walsh_entry(5, 1, 2).is_err());
    }

    #[test]
    fn point_rows_match_cells() {
        // X_k sits in row 2^(k-1) + 1 of each column.
        let dim = 4;
        let w = walsh_recursive(dim);
        for j in 1..=(1u64 << dim) {
            let p = point_of_index(j, dim).unwrap();
            for k in 0..dim {
                assert_eq!(w[1 << k][j as usize - 1], p.entries()[k] as i32);
            }
        }
    }

    #[test]
    fn product_index_matches_recursion() {
        for dim in 0..=6usize {
            let m = mapping_recursive(dim);
            if dim == 0 {
                assert_eq!(m, vec![vec![1]]);
                continue;
            }
            for i in 0..m.len() {
                for j in 0..m.len() {
                    let got = product_index(i as u64 + 1, j as u64 + 1, dim).unwrap();
                    assert_eq!(got, m[i][j]);
                }
            }
        }
        assert_eq!(product_index(2, 3, 2).unwrap(), 4);
        assert_eq!(product_index(1, 6, 3).unwrap(), 6);
        assert_eq!(product_index(5, 5, 3).unwrap(), 1);
    }

    #[test]
    fn interaction_sets_match_union_recursion() {
        for dim in 1..=8 {
            let rec = interaction_recursive(dim);
            for (k, expected) in rec.iter().enumerate() {
                let got: BTreeSet<u64> = interaction_indexes(dim, k)
                    .unwrap()
                    .members
                    .iter()
                    .map(|c| c.get().unwrap())
                    .collect();
                assert_eq!(&got, expected, "n={dim} k={k}");
            }
        }
    }

    #[test]
    fn interaction_examples() {
        for dim in 1..6 {
            let s0 = interaction_indexes(dim, 0).unwrap();
            assert_eq!(s0.members, vec![CellIndex::first(dim)]);
        }
        let s1: Vec<u64> = interaction_indexes(3, 1)
            .unwrap()
            .members
            .iter()
            .map(|c| c.get().unwrap())
            .collect();
        assert_eq!(s1, vec![2, 3, 5]);
        let total: usize = (0..=3).map(|k| interaction_indexes(4, k).unwrap().len()).sum();
        assert_eq!(total, 15);
        assert!(interaction_indexes(3, 4).unwrap().is_empty());
    }

    #[test]
    fn low_order_count_formula() {
        for n in 3..200usize {
            let n128 = n as u128;
            assert_eq!(low_order_count(n, 3), (n128.pow(3) + 5 * n128 + 6) / 6);
        }
    }

    #[test]
    fn wide_interaction_sets() {
        let s = interaction_indexes(10_000, 1).unwrap();
        assert_eq!(s.len(), 10_000);
        assert!(s.members.windows(2).all(|w| w[0] < w[1]));
        assert!(interaction_indexes(100, 50).is_err());
    }
}
