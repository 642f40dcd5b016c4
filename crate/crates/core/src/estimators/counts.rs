use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walsh::{index_of_point, CellIndex, HypercubePoint};

/// Observation multiset stored as sparse cell counts.
///
/// The weights `count / total` form the empirical distribution `p_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsVector {
    dim: usize,
    total: u64,
    cells: BTreeMap<CellIndex, u64>,
}

impl CountsVector {
    pub fn from_observations(points: &[HypercubePoint]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyData)?;
        let dim = first.dim();
        let mut cells = BTreeMap::new();
        for (row, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::Shape(format!(
                    "observation {} has n = {}, expected {dim}",
                    row + 1,
                    p.dim()
                )));
            }
            *cells.entry(index_of_point(p)).or_insert(0) += 1;
        }
        Ok(Self {
            dim,
            total: points.len() as u64,
            cells,
        })
    }

    pub fn from_cells(dim: usize, counts: impl IntoIterator<Item = (CellIndex, u64)>) -> Result<Self> {
        let mut cells = BTreeMap::new();
        for (cell, c) in counts {
            if cell.dim() != dim {
                return Err(Error::dim_mismatch(dim, cell.dim()));
            }
            if c > 0 {
                *cells.entry(cell).or_insert(0) += c;
            }
        }
        let total = cells.values().sum();
        if total == 0 {
            return Err(Error::EmptyData);
        }
        Ok(Self { dim, total, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|K|`, the number of observations.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, cell: &CellIndex) -> u64 {
        self.cells.get(cell).copied().unwrap_or(0)
    }

    pub fn weight(&self, cell: &CellIndex) -> f64 {
        self.count(cell) as f64 / self.total as f64
    }

    /// Observed cells in increasing index order with their counts.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&CellIndex, u64)> + '_ {
        self.cells.iter().map(|(c, &n)| (c, n))
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    /// The multiset expanded one entry per observation, in cell order.
    pub fn observations(&self) -> Vec<CellIndex> {
        self.cells
            .iter()
            .flat_map(|(c, &n)| std::iter::repeat_n(c.clone(), n as usize))
            .collect()
    }

    pub fn to_dense(&self) -> Result<Vec<f64>> {
        Error::check_dense("dense counts vector", self.dim)?;
        let mut dense = vec![0.0; 1 << self.dim];
        for (c, &n) in &self.cells {
            dense[c.zero_based_words()[0] as usize] = n as f64 / self.total as f64;
        }
        Ok(dense)
    }

    /// Union of two multisets.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dim_mismatch(self.dim, other.dim));
        }
        let mut cells = self.cells.clone();
        for (c, &n) in &other.cells {
            *cells.entry(c.clone()).or_insert(0) += n;
        }
        Ok(Self {
            dim: self.dim,
            total: self.total + other.total,
            cells,
        })
    }

    /// The multiset with one instance of `cell` removed.
    pub fn without_one(&self, cell: &CellIndex) -> Result<Self> {
        let mut cells = self.cells.clone();
        match cells.get_mut(cell) {
            None => {
                return Err(Error::Config(format!("cell {cell} was not observed")));
            }
            Some(n) if *n > 1 => *n -= 1,
            Some(_) => {
                cells.remove(cell);
            }
        }
        if cells.is_empty() {
            return Err(Error::EmptyData);
        }
        Ok(Self {
            dim: self.dim,
            total: self.total - 1,
            cells,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CellCount {
    cell: String,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct CountsRepr {
    n: usize,
    total: u64,
    cells: Vec<CellCount>,
}

impl Serialize for CountsVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CountsRepr {
            n: self.dim,
            total: self.total,
            cells: self
                .cells
                .iter()
                .map(|(c, &count)| CellCount {
                    cell: c.to_sign_string(),
                    count,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CountsVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CountsRepr::deserialize(d)?;
        let cells = repr
            .cells
            .into_iter()
            .map(|cc| CellIndex::parse(&cc.cell, repr.n).map(|c| (c, cc.count)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let counts = CountsVector::from_cells(repr.n, cells).map_err(D::Error::custom)?;
        if counts.total != repr.total {
            return Err(D::Error::custom(format!(
                "total {} does not match cell counts {}",
                repr.total, counts.total
            )));
        }
        Ok(counts)
    }
}
