use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A vertex of the `{-1, +1}^n` hypercube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypercubePoint {
    entries: Vec<i8>,
}

impl HypercubePoint {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("hypercube point must have n >= 1".into()));
        }
        if let Some(pos) = entries.iter().position(|&e| e != 1 && e != -1) {
            return Err(Error::Domain(format!(
                "coordinate {} is {}, expected -1 or +1",
                pos + 1,
                entries[pos]
            )));
        }
        Ok(Self { entries })
    }

    /// Builds a point from 0/1 bits with `0 -> +1` and `1 -> -1`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let entries = bits
            .iter()
            .enumerate()
            .map(|(pos, &b)| match b {
                0 => Ok(1),
                1 => Ok(-1),
                other => Err(Error::Domain(format!(
                    "coordinate {} is {other}, expected 0 or 1",
                    pos + 1
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(entries)
    }

    /// Parses strings such as `+-++-`.
    pub fn parse_signs(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Domain(format!(
                    "character {} is {other:?}, expected '+' or '-'",
                    pos + 1
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn to_sign_string(&self) -> String {
        self.entries.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect()
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.entries.iter().zip(&other.entries).filter(|(a, b)| a != b).count()
    }
}

/// A hypercube cell, i.e. a column of the naturally ordered Walsh matrix.
///
/// Stored as the bits of the zero-based index `j - 1`; bit `k - 1` is set when
/// coordinate `k` of the matching point is `-1`. Any dimension is supported,
/// so per-element kernels work far beyond the range of a `u64` index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellIndex {
    dim: usize,
    words: Box<[u64]>,
}

fn word_count(dim: usize) -> usize {
    dim.div_ceil(64).max(1)
}

impl CellIndex {
    /// Cell `j` (1-based) of the `n`-dimensional hypercube.
    pub fn new(j: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be >= 1".into()));
        }
        let in_range = j >= 1 && (dim >= 64 || j - 1 < (1u64 << dim));
        if !in_range {
            return Err(Error::Range { index: j, dim });
        }
        let mut words = vec![0u64; word_count(dim)].into_boxed_slice();
        words[0] = j - 1;
        Ok(Self { dim, words })
    }

    /// Cell 1: the all-`+1` point and the all-ones Walsh column.
    pub fn first(dim: usize) -> Self {
        Self {
            dim,
            words: vec![0u64; word_count(dim)].into_boxed_slice(),
        }
    }

    /// The coefficient index whose Walsh column is the product of the given
    /// variables (1-based variable numbers).
    pub fn from_vars(dim: usize, vars: &[usize]) -> Result<Self> {
        let mut cell = Self::first(dim);
        for &v in vars {
            if v == 0 || v > dim {
                return Err(Error::Domain(format!("variable {v} out of range [1, {dim}]")));
            }
            cell.words[(v - 1) / 64] ^= 1u64 << ((v - 1) % 64);
        }
        Ok(cell)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The 1-based index, when it fits in a `u64`.
    pub fn get(&self) -> Option<u64> {
        if self.words[1..].iter().any(|&w| w != 0) || self.words[0] == u64::MAX {
            None
        } else {
            Some(self.words[0] + 1)
        }
    }

    pub fn zero_based_words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, d: usize) -> bool {
        (self.words[d / 64] >> (d % 64)) & 1 == 1
    }

    /// Interaction order: the number of variables in the matching product.
    pub fn order(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Zero-based positions of the set bits (variables of the product).
    pub fn set_bits(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.order());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::dim_mismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    /// Index of the element-wise product of two Walsh columns.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a ^ b).collect();
        Ok(Self { dim: self.dim, words })
    }

    /// `W[self, other]` as `+1` / `-1`.
    pub fn walsh_sign(&self, other: &Self) -> Result<i8> {
        self.check_same_dim(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(if ones.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Number of coordinates where the two matching points differ.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_same_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Calls `f(d)` for each zero-based coordinate where the points differ.
    #[inline]
    pub fn for_each_disagreement(&self, other: &Self, mut f: impl FnMut(usize)) {
        for (wi, (a, b)) in self.words.iter().zip(other.words.iter()).enumerate() {
            let mut x = a ^ b;
            while x != 0 {
                f(wi * 64 + x.trailing_zeros() as usize);
                x &= x - 1;
            }
        }
    }

    pub fn to_point(&self) -> HypercubePoint {
        let entries = (0..self.dim).map(|d| if self.bit(d) { -1 } else { 1 }).collect();
        HypercubePoint { entries }
    }

    pub fn to_sign_string(&self) -> String {
        (0..self.dim).map(|d| if self.bit(d) { '-' } else { '+' }).collect()
    }

    /// Parses either a sign string (`+-+`) or a 1-based integer index.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let spec = spec.trim();
        if spec.chars().all(|c| c == '+' || c == '-') && !spec.is_empty() {
            let point = HypercubePoint::parse_signs(spec)?;
            if point.dim() != dim {
                return Err(Error::dim_mismatch(dim, point.dim()));
            }
            return Ok(index_of_point(&point));
        }
        let j: u64 = spec
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse cell {spec:?}")))?;
        Self::new(j, dim)
    }
}

impl Ord for CellIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for CellIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(j) => write!(f, "CellIndex({j}; n={})", self.dim),
            None => write!(f, "CellIndex({}; n={})", self.to_sign_string(), self.dim),
        }
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(j) if self.dim < 64 => write!(f, "{j}"),
            _ => f.write_str(&self.to_sign_string()),
        }
    }
}

/// Maps a point to its cell: `j = 1 + sum_k bit_k 2^(k-1)` with `bit_k = 1`
/// exactly when `x_k = -1`.
pub fn index_of_point(x: &HypercubePoint) -> CellIndex {
    let mut cell = CellIndex::first(x.dim());
    for (d, &e) in x.entries().iter().enumerate() {
        if e < 0 {
            cell.words[d / 64] |= 1u64 << (d % 64);
        }
    }
    cell
}

pub fn point_of_index(j: u64, dim: usize) -> Result<HypercubePoint> {
    Ok(CellIndex::new(j, dim)?.to_point())
}
