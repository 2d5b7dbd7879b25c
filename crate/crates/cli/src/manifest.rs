//! Dataset description: which files hold each region's monthly case counts
//! and each covariate's monthly levels, the populations that scale counts
//! to incidence, per-series missing-value policies, and the calendar window
//! the analysis should cover. Data paths are relative to the manifest file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use epicast_core::calendar::CalendarMonth;
use epicast_core::series::MissingPolicy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
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
    #[error("manifest lists no regions")]
    NoRegions,
    #[error("region `{name}`: population must be positive")]
    ZeroPopulation { name: String },
    #[error("covariate `{name}`: evac threshold must be finite")]
    BadThreshold { name: String },
    #[error("duplicate series name `{name}`")]
    DuplicateName { name: String },
    #[error("series names `{a}` and `{b}` collide once sanitized for file names")]
    NameCollision { a: String, b: String },
    #[error("calendar start {start} is after end {end}")]
    BackwardsCalendar {
        start: CalendarMonth,
        end: CalendarMonth,
    },
}

/// One region: a case-count file and the population that scales counts to
/// incidence per 100 000.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub name: String,
    pub incidence_file: PathBuf,
    pub population: u64,
}

/// One shared covariate series. Gaps default to linear interpolation;
/// `evac_threshold` additionally derives a 0/1 column `above_evac_<name>`
/// marking months at or above the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateEntry {
    pub name: String,
    pub file: PathBuf,
    #[serde(default = "default_covariate_policy")]
    pub missing_policy: MissingPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evac_threshold: Option<f64>,
}

fn default_covariate_policy() -> MissingPolicy {
    MissingPolicy::InterpolateLinear
}

/// Inclusive month window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalendarSpan {
    pub start: CalendarMonth,
    pub end: CalendarMonth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub regions: Vec<RegionEntry>,
    #[serde(default)]
    pub covariates: Vec<CovariateEntry>,
    pub calendar: CalendarSpan,
}

impl DatasetManifest {
    /// Loads and validates a manifest file.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|cause| ManifestError::Io {
            file: file.clone(),
            cause,
        })?;
        let manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| ManifestError::Json {
                file,
                line: e.line(),
                message: e.to_string(),
            })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        if self.regions.is_empty() {
            return Err(ManifestError::NoRegions);
        }
        if self.calendar.start > self.calendar.end {
            return Err(ManifestError::BackwardsCalendar {
                start: self.calendar.start,
                end: self.calendar.end,
            });
        }
        for region in &self.regions {
            if region.population == 0 {
                return Err(ManifestError::ZeroPopulation {
                    name: region.name.clone(),
                });
            }
        }
        for covariate in &self.covariates {
            if covariate.evac_threshold.is_some_and(|t| !t.is_finite()) {
                return Err(ManifestError::BadThreshold {
                    name: covariate.name.clone(),
                });
            }
        }

        let mut seen: HashSet<&str> = HashSet::new();
        let mut slugs: Vec<(String, &str)> = Vec::new();
        let names = self
            .regions
            .iter()
            .map(|r| r.name.as_str())
            .chain(self.covariates.iter().map(|c| c.name.as_str()));
        for name in names {
            if !seen.insert(name) {
                return Err(ManifestError::DuplicateName { name: name.into() });
            }
            let slug = file_slug(name);
            if let Some((_, other)) = slugs.iter().find(|(s, _)| *s == slug) {
                return Err(ManifestError::NameCollision {
                    a: (*other).into(),
                    b: name.into(),
                });
            }
            slugs.push((slug, name));
        }
        Ok(())
    }
}

/// Series name reduced to a form safe inside output file names.
pub fn file_slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}
