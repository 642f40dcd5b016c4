use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cli::data::{DataFormat, Encoding};
use crate::cross_validation::{Axis, LossKind};
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::synth::Planted;

/// The TOML file passed with `--config`.
///
/// ```toml
/// seed = 7
///
/// [data]
/// encoding = "signs"
///
/// [estimator]
/// variant = "waak"
/// weights = [1.0, 1.0, 1.0]
/// gamma = 2.0
///
/// [cv]
/// loss = "kl"
/// axes = [{ param = "gamma", values = [1.0, 2.0, 4.0] }]
///
/// [query]
/// cells = ["++-", "4"]
/// response = 1
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataSection,
    pub estimator: Option<EstimatorConfig>,
    pub cv: Option<CvSection>,
    pub query: QuerySection,
    pub synth: Option<SynthSection>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub encoding: Encoding,
    pub delimiter: char,
    pub header: bool,
}

impl Default for DataSection {
    fn default() -> Self {
        let f = DataFormat::default();
        Self {
            path: None,
            encoding: f.encoding,
            delimiter: f.delimiter,
            header: f.header,
        }
    }
}

impl DataSection {
    pub fn format(&self) -> DataFormat {
        DataFormat {
            encoding: self.encoding,
            delimiter: self.delimiter,
            header: self.header,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSection {
    #[serde(default = "default_loss")]
    pub loss: LossKind,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub budget: Option<usize>,
    /// Coordinate descent on the WAAK weights after the grid, if set.
    #[serde(default)]
    pub sweeps: Option<usize>,
    #[serde(default)]
    pub weight_grid: Vec<f64>,
}

fn default_loss() -> LossKind {
    LossKind::Kl
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuerySection {
    /// Sign strings or 1-based indexes; empty means every cell (n <= 20).
    pub cells: Vec<String>,
    /// 1-based coordinate whose conditional expectation is reported.
    pub response: Option<usize>,
    /// Clamp negative estimates and renormalize (full vectors only).
    pub clamp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub model: Planted,
    pub count: usize,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks every block against the parameter domains before any work.
    pub fn validate(&self) -> Result<()> {
        if let Some(est) = &self.estimator {
            est.validate()?;
        }
        if let Some(synth) = &self.synth {
            synth.model.validate()?;
        }
        if let Some(cv) = &self.cv {
            if cv.sweeps == Some(0) {
                return Err(Error::Config("cv.sweeps must be >= 1".into()));
            }
            if cv.sweeps.is_some() && cv.weight_grid.is_empty() {
                return Err(Error::Config("cv.sweeps needs a nonempty cv.weight_grid".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub fn estimator(&self) -> Result<&EstimatorConfig> {
        self.estimator
            .as_ref()
            .ok_or_else(|| Error::Config("config has no [estimator] block".into()))
    }
}
