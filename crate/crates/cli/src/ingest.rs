//! Building an aligned modelling dataset from a manifest: parse every
//! series, resolve gaps per policy, scale case counts to incidence per
//! 100 000, derive any threshold covariates, and cut everything to the
//! common calendar window. Policies run on each file's full span first so
//! interpolation can use neighbours that fall outside the final window.

use std::fs;
use std::path::{Path, PathBuf};

use epicast_core::calendar::CalendarMonth;
use epicast_core::eval::AlignedDataset;
use epicast_core::series::{MissingPolicy, SeriesError, TimeSeries};
use thiserror::Error;

use crate::csv::{parse_series_csv, write_series_csv, CsvError};
use crate::manifest::{file_slug, CalendarSpan, CovariateEntry, DatasetManifest, RegionEntry};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("series `{name}`: {cause}")]
    Policy { name: String, cause: SeriesError },
    #[error("no common window: {from_owner} starts {from} but {to_owner} ends {to}")]
    EmptyOverlap {
        from_owner: String,
        from: CalendarMonth,
        to_owner: String,
        to: CalendarMonth,
    },
    #[error("{path}: {cause}")]
    Io {
        path: String,
        cause: std::io::Error,
    },
}

/// An aligned dataset plus an account of what ingestion did to build it.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub data: AlignedDataset,
    pub window: CalendarSpan,
    pub notes: Vec<String>,
}

struct Prepared {
    name: String,
    series: TimeSeries,
}

/// Reads every file named by the manifest and assembles the dataset all
/// models consume. `base` anchors the manifest's relative paths.
pub fn ingest(manifest: &DatasetManifest, base: &Path) -> Result<Ingested, IngestError> {
    let mut notes = Vec::new();
    let mut regions = Vec::new();
    for region in &manifest.regions {
        let prepared = prepare_region(region, base, &mut notes)?;
        regions.push(prepared);
    }
    let mut covariates = Vec::new();
    for covariate in &manifest.covariates {
        prepare_covariate(covariate, base, &mut notes, &mut covariates)?;
    }

    let window = common_window(manifest.calendar, regions.iter().chain(&covariates))?;
    notes.push(format!(
        "aligned window {}..{} ({} months)",
        window.start,
        window.end,
        window.end.months_since(window.start) + 1
    ));

    let clip = |p: Prepared| {
        let series = p
            .series
            .window(window.start, window.end)
            .expect("window within every series by construction");
        (p.name, series)
    };
    Ok(Ingested {
        data: AlignedDataset {
            regions: regions.into_iter().map(clip).collect(),
            covariates: covariates.into_iter().map(clip).collect(),
        },
        window,
        notes,
    })
}

fn prepare_region(
    region: &RegionEntry,
    base: &Path,
    notes: &mut Vec<String>,
) -> Result<Prepared, IngestError> {
    let raw = parse_series_csv(&base.join(&region.incidence_file))?;
    let gaps = raw.missing_count();
    if gaps > 0 {
        notes.push(format!(
            "region {}: filled {gaps} missing months with zero",
            region.name
        ));
    }
    let counts = resolve(&raw, MissingPolicy::FillZero, &region.name)?;
    let scale = 100_000.0 / region.population as f64;
    let values = counts.dense().expect("resolved series is dense");
    let series = TimeSeries::from_values(counts.start(), values.iter().map(|v| v * scale).collect())
        .expect("resolved series is nonempty");
    Ok(Prepared {
        name: region.name.clone(),
        series,
    })
}

fn prepare_covariate(
    covariate: &CovariateEntry,
    base: &Path,
    notes: &mut Vec<String>,
    out: &mut Vec<Prepared>,
) -> Result<(), IngestError> {
    let raw = parse_series_csv(&base.join(&covariate.file))?;
    let gaps = raw.missing_count();
    if gaps > 0 {
        let action = match covariate.missing_policy {
            MissingPolicy::Fail => "rejected",
            MissingPolicy::FillZero => "filled with zero",
            MissingPolicy::InterpolateLinear => "interpolated",
        };
        notes.push(format!(
            "covariate {}: {gaps} missing months {action}",
            covariate.name
        ));
    }
    let series = resolve(&raw, covariate.missing_policy, &covariate.name)?;

    if let Some(threshold) = covariate.evac_threshold {
        let name = format!("above_evac_{}", covariate.name);
        let flags = series
            .dense()
            .expect("resolved series is dense")
            .iter()
            .map(|v| f64::from(u8::from(*v >= threshold)))
            .collect();
        let derived = TimeSeries::from_values(series.start(), flags)
            .expect("resolved series is nonempty");
        notes.push(format!(
            "derived {name}: {} at or above {threshold}",
            covariate.name
        ));
        out.push(Prepared {
            name: covariate.name.clone(),
            series,
        });
        out.push(Prepared {
            name,
            series: derived,
        });
    } else {
        out.push(Prepared {
            name: covariate.name.clone(),
            series,
        });
    }
    Ok(())
}

fn resolve(
    series: &TimeSeries,
    policy: MissingPolicy,
    name: &str,
) -> Result<TimeSeries, IngestError> {
    series
        .resolve_missing(policy)
        .map_err(|cause| IngestError::Policy {
            name: name.into(),
            cause,
        })
}

/// Intersects the manifest calendar with every series' coverage, tracking
/// which input set each bound so an empty result names the culprits.
fn common_window<'a>(
    calendar: CalendarSpan,
    series: impl Iterator<Item = &'a Prepared>,
) -> Result<CalendarSpan, IngestError> {
    let mut from = (calendar.start, "the manifest calendar".to_string());
    let mut to = (calendar.end, "the manifest calendar".to_string());
    for p in series {
        if p.series.start() > from.0 {
            from = (p.series.start(), format!("`{}`", p.name));
        }
        if p.series.end() < to.0 {
            to = (p.series.end(), format!("`{}`", p.name));
        }
    }
    if from.0 > to.0 {
        return Err(IngestError::EmptyOverlap {
            from_owner: from.1,
            from: from.0,
            to_owner: to.1,
            to: to.0,
        });
    }
    Ok(CalendarSpan {
        start: from.0,
        end: to.0,
    })
}

/// Writes the aligned dataset as plain series CSVs plus a manifest that
/// re-ingests them unchanged: populations of 100 000 make the incidence
/// scaling the identity and every gap is already resolved. Returns the
/// manifest path.
pub fn write_aligned(
    data: &AlignedDataset,
    window: CalendarSpan,
    dir: &Path,
) -> Result<PathBuf, IngestError> {
    fs::create_dir_all(dir).map_err(|cause| IngestError::Io {
        path: dir.display().to_string(),
        cause,
    })?;

    let mut regions = Vec::new();
    for (name, series) in &data.regions {
        let file = format!("incidence_{}.csv", file_slug(name));
        write_series_csv(&dir.join(&file), series)?;
        regions.push(RegionEntry {
            name: name.clone(),
            incidence_file: file.into(),
            population: 100_000,
        });
    }
    let mut covariates = Vec::new();
    for (name, series) in &data.covariates {
        let file = format!("covariate_{}.csv", file_slug(name));
        write_series_csv(&dir.join(&file), series)?;
        covariates.push(CovariateEntry {
            name: name.clone(),
            file: file.into(),
            missing_policy: MissingPolicy::Fail,
            evac_threshold: None,
        });
    }

    let manifest = DatasetManifest {
        regions,
        covariates,
        calendar: window,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|cause| IngestError::Io {
        path: path.display().to_string(),
        cause,
    })?;
    Ok(path)
}
