//! Comparison report: one row per (region, method) with skill scores, the
//! per-region best flags, and CSV / plain-text rendering.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The three compared forecasters, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Arima,
    Arimax,
    Sfplr,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Arima, Method::Arimax, Method::Sfplr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Arima => "ARIMA",
            Method::Arimax => "ARIMAX",
            Method::Sfplr => "SFPLR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scores and forecasts for one successful (region, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub nse: f64,
    pub rmse: f64,
    pub predictions: Vec<f64>,
    pub observed: Vec<f64>,
    /// Highest NSE among this region's methods (ties share the flag).
    pub best_nse: bool,
    /// Lowest RMSE among this region's methods.
    pub best_rmse: bool,
}

/// One report row; a failed fit carries its reason instead of scores.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub region: String,
    pub method: Method,
    pub outcome: Result<MethodOutcome, String>,
}

#[derive(Debug, Clone)]
pub struct EvaluationReport {
    /// Rows in fixed (region, method) order.
    pub rows: Vec<ReportRow>,
}

impl EvaluationReport {
    /// CSV with one row per (region, method); failed cells carry NA scores.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("region,method,nse,rmse,best_nse,best_rmse\n");
        for row in &self.rows {
            let (nse, rmse, bn, br) = match &row.outcome {
                Ok(cell) => (
                    cell.nse.to_string(),
                    cell.rmse.to_string(),
                    cell.best_nse,
                    cell.best_rmse,
                ),
                Err(_) => ("NA".to_string(), "NA".to_string(), false, false),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(&row.region),
                row.method,
                nse,
                rmse,
                bn,
                br
            ));
        }
        out
    }

    /// Aligned text table; the best score per region and column is starred.
    pub fn to_table(&self) -> String {
        let mut cells: Vec<[String; 4]> = Vec::with_capacity(self.rows.len() + 1);
        cells.push([
            "region".into(),
            "method".into(),
            "NSE".into(),
            "RMSE".into(),
        ]);
        for row in &self.rows {
            let (nse, rmse) = match &row.outcome {
                Ok(cell) => (
                    format!("{:.2}{}", cell.nse, if cell.best_nse { "*" } else { "" }),
                    format!("{:.2}{}", cell.rmse, if cell.best_rmse { "*" } else { "" }),
                ),
                Err(reason) => (format!("failed: {reason}"), "-".into()),
            };
            cells.push([row.region.clone(), row.method.to_string(), nse, rmse]);
        }
        let widths: Vec<usize> = (0..4)
            .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap())
            .collect();
        let mut out = String::new();
        for row in &cells {
            for (c, field) in row.iter().enumerate() {
                if c > 0 {
                    out.push_str("  ");
                }
                out.push_str(field);
                if c < 3 {
                    for _ in field.chars().count()..widths[c] {
                        out.push(' ');
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Stars the best finite NSE (highest) and RMSE (lowest) within each region;
/// exact ties are all flagged, failed cells never are.
pub(super) fn flag_best(rows: &mut [ReportRow]) {
    let mut start = 0;
    while start < rows.len() {
        let region = rows[start].region.clone();
        let end = rows[start..]
            .iter()
            .position(|r| r.region != region)
            .map_or(rows.len(), |k| start + k);
        let group = &mut rows[start..end];

        let best_nse = group
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .map(|c| c.nse)
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let best_rmse = group
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .map(|c| c.rmse)
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        for row in group.iter_mut() {
            if let Ok(cell) = &mut row.outcome {
                cell.best_nse = cell.nse == best_nse;
                cell.best_rmse = cell.rmse == best_rmse;
            }
        }
        start = end;
    }
}
