//! JSON reports written by the CLI.
//!
//! Reports never contain wall-clock data unless `--timing` is given, so two
//! runs on the same inputs produce identical files. A dominated KL
//! surrogate is written as the string `"-inf"`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cli::data::Encoding;
use crate::cross_validation::{DescentOutcome, GridRow, LossKind, RiskReport};
use crate::error::{Error, Result};
use crate::estimators::{CountsVector, DensityEstimate, EstimatorConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub path: String,
    pub encoding: Encoding,
    pub n: usize,
    pub observations: u64,
    pub distinct_cells: usize,
}

impl DataSummary {
    pub fn new(path: &Path, encoding: Encoding, counts: &CountsVector) -> Self {
        Self {
            path: path.display().to_string(),
            encoding,
            n: counts.dim(),
            observations: counts.total(),
            distinct_cells: counts.support_len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub data: DataSummary,
    pub fitted: EstimatorConfig,
    pub nonnegative_guaranteed: bool,
    pub estimate: DensityEstimate,
    pub counts: CountsVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Pair-count identities of the leave-one-out evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementAccounting {
    pub observations: u64,
    pub distinct_cells: usize,
    pub element_evaluations: u64,
    /// `|K| (|K| - 1) / 2`
    pub element_bound: u64,
    pub squared_element_evaluations: u64,
    /// `|K| (|K| + 1) / 2` for SE, `0` for KL.
    pub squared_element_bound: u64,
}

impl ElementAccounting {
    pub fn new(report: &RiskReport, counts: &CountsVector) -> Self {
        let k = counts.total();
        Self {
            observations: k,
            distinct_cells: counts.support_len(),
            element_evaluations: report.element_evaluations,
            element_bound: k * (k - 1) / 2,
            squared_element_evaluations: report.squared_element_evaluations,
            squared_element_bound: match report.loss {
                LossKind::Se => k * (k + 1) / 2,
                LossKind::Kl => 0,
            },
        }
    }

    pub fn within_bounds(&self) -> bool {
        self.element_evaluations <= self.element_bound && self.squared_element_evaluations <= self.squared_element_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub data: DataSummary,
    pub loss: LossKind,
    pub grid_size: usize,
    /// False when the budget stopped the grid early.
    pub complete: bool,
    pub best_label: String,
    pub fitted: EstimatorConfig,
    pub risk: RiskReport,
    pub accounting: ElementAccounting,
    pub table: Vec<GridRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentOutcome>,
    pub counts: CountsVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRow {
    pub cell: String,
    pub p_plus: f64,
    pub p_minus: f64,
    /// `(p_plus - p_minus) / (p_plus + p_minus)`; absent if both are zero.
    pub expectation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub schema_version: u32,
    pub command: String,
    pub fit: String,
    pub fitted: EstimatorConfig,
    pub estimate: DensityEstimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditional: Vec<ConditionalRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// The part of an `estimate` or `cv` report that `query` reads.
#[derive(Debug, Clone, Deserialize)]
pub struct FitView {
    pub schema_version: u32,
    pub fitted: EstimatorConfig,
    pub counts: CountsVector,
}

impl FitView {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read fit report {}: {e}", path.display())))?;
        let view: FitView = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("fit report {}: {e}", path.display()),
        })?;
        if view.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "fit report has schema version {}, expected {SCHEMA_VERSION}",
                view.schema_version
            )));
        }
        view.fitted.validate()?;
        Ok(view)
    }
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::Io(format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
