//! Run settings loaded from JSON: the train/test split, per-method model
//! options, and where outputs go. Unspecified blocks take defaults, so a
//! minimal config is just a split and an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use epicast_core::eval::{
    ArimaConfig, ArimaxConfig, ComparisonConfig, NseReference, SfplrConfig, SplitSpec,
};
use epicast_core::sfplr::{CovariateMode, Kernel, SemiMetricSpec, TargetSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}: {cause}")]
    Io {
        file: String,
        cause: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Json {
        file: String,
        line: usize,
        message: String,
    },
    #[error("split.horizon must be positive")]
    ZeroHorizon,
    #[error("sfplr.tau must be positive")]
    ZeroTau,
    #[error("sfplr.h_grid entries must be positive and finite")]
    BadBandwidth,
}

/// Functional-model options, plus the scalar summary the standalone `fit`
/// path models (the comparison instead predicts each test month in turn).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfplrRunConfig {
    #[serde(default = "default_metric")]
    pub metric: SemiMetricSpec,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default = "default_target")]
    pub target: TargetSpec,
    /// Curve length in months.
    #[serde(default = "default_tau")]
    pub tau: usize,
    #[serde(default)]
    pub covariate_mode: CovariateMode,
    /// Bandwidth candidates; omitted means a data-driven default grid.
    #[serde(default)]
    pub h_grid: Option<Vec<f64>>,
}

fn default_metric() -> SemiMetricSpec {
    SemiMetricSpec::EuclidGrid
}

fn default_target() -> TargetSpec {
    TargetSpec::MonthValue { month_index: 0 }
}

fn default_tau() -> usize {
    12
}

impl Default for SfplrRunConfig {
    fn default() -> Self {
        Self {
            metric: default_metric(),
            kernel: Kernel::default(),
            target: default_target(),
            tau: default_tau(),
            covariate_mode: CovariateMode::default(),
            h_grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Also write per-region SVG charts from `compare`.
    #[serde(default)]
    pub emit_plots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub split: SplitSpec,
    #[serde(default)]
    pub arima: ArimaConfig,
    #[serde(default)]
    pub arimax: ArimaxConfig,
    #[serde(default)]
    pub sfplr: SfplrRunConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub nse_reference: NseReference,
    /// Recorded for provenance; every fitting path here is deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Loads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|cause| ConfigError::Io {
            file: file.clone(),
            cause,
        })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError::Json {
            file,
            line: e.line(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.split.horizon == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        if self.sfplr.tau == 0 {
            return Err(ConfigError::ZeroTau);
        }
        if let Some(grid) = &self.sfplr.h_grid {
            if grid.is_empty() || grid.iter().any(|h| !h.is_finite() || *h <= 0.0) {
                return Err(ConfigError::BadBandwidth);
            }
        }
        Ok(())
    }

    /// The comparison-protocol view of these settings.
    pub fn comparison(&self) -> ComparisonConfig {
        ComparisonConfig {
            arima: self.arima,
            arimax: self.arimax.clone(),
            sfplr: SfplrConfig {
                metric: self.sfplr.metric,
                kernel: self.sfplr.kernel,
                tau: self.sfplr.tau,
                covariate_mode: self.sfplr.covariate_mode,
                h_grid: self.sfplr.h_grid.clone(),
            },
            nse_reference: self.nse_reference,
        }
    }
}
