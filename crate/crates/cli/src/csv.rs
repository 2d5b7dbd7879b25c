//! Monthly series files: a two-column CSV with header `date,value`, dates
//! as `YYYY-MM`, one row per month in any order, and an empty value field
//! marking a missing observation. Reading produces a gapless series
//! spanning the file's earliest to latest month; writing emits one row per
//! month, so a written file reads back as the identical series.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use epicast_core::calendar::CalendarMonth;
use epicast_core::series::TimeSeries;
use thiserror::Error;

/// Reading or writing failure, located by file and 1-based line where one
/// applies.
#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{file}: {cause}")]
    Io {
        file: String,
        cause: std::io::Error,
    },
    #[error("{file}: not valid UTF-8")]
    NotUtf8 { file: String },
    #[error("{file}:1: expected header `date,value`, found `{found}`")]
    BadHeader { file: String, found: String },
    #[error("{file}:{line}: expected `date,value`, found `{found}`")]
    BadRow {
        file: String,
        line: usize,
        found: String,
    },
    #[error("{file}:{line}: unparseable month `{text}` (expected YYYY-MM)")]
    BadDate {
        file: String,
        line: usize,
        text: String,
    },
    #[error("{file}:{line}: unparseable value `{text}`")]
    BadValue {
        file: String,
        line: usize,
        text: String,
    },
    #[error("{file}:{line}: duplicate month {month}")]
    DuplicateMonth {
        file: String,
        line: usize,
        month: CalendarMonth,
    },
    #[error("{file}: no data rows")]
    Empty { file: String },
}

/// Reads one monthly series file.
pub fn parse_series_csv(path: &Path) -> Result<TimeSeries, CsvError> {
    let file = path.display().to_string();
    let bytes = fs::read(path).map_err(|cause| CsvError::Io {
        file: file.clone(),
        cause,
    })?;
    let text = String::from_utf8(bytes).map_err(|_| CsvError::NotUtf8 { file: file.clone() })?;
    parse_series_text(&text, &file)
}

/// Parses series CSV text; `file` labels error locations.
pub fn parse_series_text(text: &str, file: &str) -> Result<TimeSeries, CsvError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| CsvError::Empty { file: file.into() })?;
    if header.trim() != "date,value" {
        return Err(CsvError::BadHeader {
            file: file.into(),
            found: header.trim().into(),
        });
    }

    let mut rows: BTreeMap<CalendarMonth, Option<f64>> = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (date_text, value_text) = raw.split_once(',').ok_or_else(|| CsvError::BadRow {
            file: file.into(),
            line,
            found: raw.into(),
        })?;
        let month: CalendarMonth = date_text.trim().parse().map_err(|_| CsvError::BadDate {
            file: file.into(),
            line,
            text: date_text.trim().into(),
        })?;
        let value_text = value_text.trim();
        let value = if value_text.is_empty() {
            None
        } else {
            let v: f64 = value_text.parse().map_err(|_| CsvError::BadValue {
                file: file.into(),
                line,
                text: value_text.into(),
            })?;
            if !v.is_finite() {
                return Err(CsvError::BadValue {
                    file: file.into(),
                    line,
                    text: value_text.into(),
                });
            }
            Some(v)
        };
        if rows.insert(month, value).is_some() {
            return Err(CsvError::DuplicateMonth {
                file: file.into(),
                line,
                month,
            });
        }
    }

    let (first, last) = match (rows.keys().next(), rows.keys().next_back()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(CsvError::Empty { file: file.into() }),
    };
    let n = last.months_since(first) as usize + 1;
    let mut values = vec![None; n];
    for (month, value) in &rows {
        values[month.months_since(first) as usize] = *value;
    }
    Ok(TimeSeries::new(first, values).expect("at least one row"))
}

/// Writes a series in the format `parse_series_csv` reads. Values use the
/// shortest decimal form that parses back to the same number.
pub fn write_series_csv(path: &Path, series: &TimeSeries) -> Result<(), CsvError> {
    let mut out = String::from("date,value\n");
    for (k, value) in series.values().iter().enumerate() {
        let _ = write!(out, "{},", series.month_at(k));
        if let Some(v) = value {
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|cause| CsvError::Io {
        file: path.display().to_string(),
        cause,
    })
}
