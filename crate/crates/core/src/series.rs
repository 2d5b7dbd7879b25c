//! Monthly time-series data model: gapless series with explicit missing
//! markers, segmentation into fixed-length curves, and the differencing
//! plumbing the forecasting pipelines need.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calendar::CalendarMonth;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series must contain at least one value")]
    Empty,
    #[error("value at offset {index} is not finite")]
    NonFinite { index: usize },
    #[error("{count} missing values (first at {first})")]
    MissingValues { count: usize, first: CalendarMonth },
    #[error("cannot interpolate across a leading or trailing gap at {month}")]
    EdgeGap { month: CalendarMonth },
    #[error("need at least {needed} values to cut curves of length {tau}, got {got}")]
    TooShortToSegment { needed: usize, got: usize, tau: usize },
    #[error("curve length must be positive")]
    ZeroTau,
    #[error("differencing order {d} requires more than {len} values")]
    DifferenceOrder { d: usize, len: usize },
    #[error("expected {expected} stored head values for integration, got {got}")]
    HeadCount { expected: usize, got: usize },
    #[error("requested window {from}..{to} is outside the observed range {start}..{end}")]
    WindowOutOfRange {
        from: CalendarMonth,
        to: CalendarMonth,
        start: CalendarMonth,
        end: CalendarMonth,
    },
    #[error("window start {from} is after window end {to}")]
    EmptyWindow { from: CalendarMonth, to: CalendarMonth },
    #[error("curve {index} has {got} samples, expected {tau}")]
    RaggedCurve { index: usize, got: usize, tau: usize },
    #[error("a functional sample needs at least 2 curves, got {got}")]
    TooFewCurves { got: usize },
}

/// How to resolve missing observations before modelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Refuse to proceed (the default: silent gap handling hides data bugs).
    Fail,
    /// Treat gaps as zero. Appropriate for case counts, where the absence of
    /// a notification means no cases were reported.
    FillZero,
    /// Linear interpolation between the nearest observed neighbours.
    /// Appropriate for slowly varying environmental covariates. Gaps at
    /// either end of the series are an error.
    InterpolateLinear,
}

/// A monthly series starting at a fixed calendar month. The time index is
/// implicit and gapless: entry `k` is the observation for `start + k` months.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: CalendarMonth,
    values: Vec<Option<f64>>,
}

impl TimeSeries {
    /// Samples per year. The whole pipeline is monthly.
    pub const FREQ: usize = 12;

    pub fn new(start: CalendarMonth, values: Vec<Option<f64>>) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (index, v) in values.iter().enumerate() {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(SeriesError::NonFinite { index });
                }
            }
        }
        Ok(Self { start, values })
    }

    /// Builds a fully observed series.
    pub fn from_values(start: CalendarMonth, values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::new(start, values.into_iter().map(Some).collect())
    }

    pub fn start(&self) -> CalendarMonth {
        self.start
    }

    /// Month of the last observation.
    pub fn end(&self) -> CalendarMonth {
        self.start.plus_months(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty series
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn month_at(&self, offset: usize) -> CalendarMonth {
        self.start.plus_months(offset as i64)
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// The observations as plain reals; errors if any are missing.
    pub fn dense(&self) -> Result<Vec<f64>, SeriesError> {
        let count = self.missing_count();
        if count > 0 {
            let first = self
                .values
                .iter()
                .position(Option::is_none)
                .map(|k| self.month_at(k))
                .expect("count > 0");
            return Err(SeriesError::MissingValues { count, first });
        }
        Ok(self.values.iter().map(|v| v.unwrap()).collect())
    }

    /// Applies a missing-value policy, returning a fully observed series.
    pub fn resolve_missing(&self, policy: MissingPolicy) -> Result<TimeSeries, SeriesError> {
        match policy {
            MissingPolicy::Fail => {
                let dense = self.dense()?;
                TimeSeries::from_values(self.start, dense)
            }
            MissingPolicy::FillZero => TimeSeries::from_values(
                self.start,
                self.values.iter().map(|v| v.unwrap_or(0.0)).collect(),
            ),
            MissingPolicy::InterpolateLinear => {
                let mut out: Vec<f64> = Vec::with_capacity(self.values.len());
                let n = self.values.len();
                let mut k = 0;
                while k < n {
                    match self.values[k] {
                        Some(v) => {
                            out.push(v);
                            k += 1;
                        }
                        None => {
                            if k == 0 {
                                return Err(SeriesError::EdgeGap {
                                    month: self.month_at(0),
                                });
                            }
                            let gap_start = k;
                            while k < n && self.values[k].is_none() {
                                k += 1;
                            }
                            if k == n {
                                return Err(SeriesError::EdgeGap {
                                    month: self.month_at(gap_start),
                                });
                            }
                            let left = out[gap_start - 1];
                            let right = self.values[k].unwrap();
                            let span = (k - gap_start + 1) as f64;
                            for (j, _) in (gap_start..k).enumerate() {
                                out.push(left + (right - left) * (j as f64 + 1.0) / span);
                            }
                        }
                    }
                }
                TimeSeries::from_values(self.start, out)
            }
        }
    }

    /// Restricts the series to an inclusive month window.
    pub fn window(
        &self,
        from: CalendarMonth,
        to: CalendarMonth,
    ) -> Result<TimeSeries, SeriesError> {
        if from > to {
            return Err(SeriesError::EmptyWindow { from, to });
        }
        if from < self.start || to > self.end() {
            return Err(SeriesError::WindowOutOfRange {
                from,
                to,
                start: self.start,
                end: self.end(),
            });
        }
        let a = from.months_since(self.start) as usize;
        let b = to.months_since(self.start) as usize;
        TimeSeries::new(from, self.values[a..=b].to_vec())
    }
}

/// A sample of `n` consecutive curves of fixed length `tau`, cut from a
/// monthly series. Curve `i`, sample `j` is the observation for
/// `origin + i·tau + j` months.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    curves: Vec<Vec<f64>>,
    tau: usize,
    origin: CalendarMonth,
}

impl FunctionalSample {
    pub fn new(
        curves: Vec<Vec<f64>>,
        tau: usize,
        origin: CalendarMonth,
    ) -> Result<Self, SeriesError> {
        if tau == 0 {
            return Err(SeriesError::ZeroTau);
        }
        if curves.len() < 2 {
            return Err(SeriesError::TooFewCurves { got: curves.len() });
        }
        for (index, c) in curves.iter().enumerate() {
            if c.len() != tau {
                return Err(SeriesError::RaggedCurve {
                    index,
                    got: c.len(),
                    tau,
                });
            }
            if let Some(bad) = c.iter().position(|v| !v.is_finite()) {
                return Err(SeriesError::NonFinite {
                    index: index * tau + bad,
                });
            }
        }
        Ok(Self {
            curves,
            tau,
            origin,
        })
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn origin(&self) -> CalendarMonth {
        self.origin
    }

    pub fn curves(&self) -> &[Vec<f64>] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &[f64] {
        &self.curves[i]
    }

    /// Calendar month of sample `j` of curve `i`.
    pub fn month_of(&self, i: usize, j: usize) -> CalendarMonth {
        self.origin.plus_months((i * self.tau + j) as i64)
    }

    /// Concatenates the curves back into one sequence.
    pub fn flatten(&self) -> Vec<f64> {
        self.curves.iter().flatten().copied().collect()
    }
}

/// Result of cutting a series into curves, including how many of the oldest
/// observations had to be dropped to reach a whole number of curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub sample: FunctionalSample,
    pub dropped_head: usize,
}

/// Cuts a fully observed series into `floor(N/tau)` curves of length `tau`.
/// When `tau` does not divide N, the oldest `N mod tau` observations are
/// dropped so the newest data stays aligned with the end of the series.
pub fn segment(series: &TimeSeries, tau: usize) -> Result<Segmentation, SeriesError> {
    if tau == 0 {
        return Err(SeriesError::ZeroTau);
    }
    let values = series.dense()?;
    let n_values = values.len();
    if n_values < 2 * tau {
        return Err(SeriesError::TooShortToSegment {
            needed: 2 * tau,
            got: n_values,
            tau,
        });
    }
    let dropped_head = n_values % tau;
    let curves: Vec<Vec<f64>> = values[dropped_head..]
        .chunks_exact(tau)
        .map(<[f64]>::to_vec)
        .collect();
    let origin = series.start().plus_months(dropped_head as i64);
    Ok(Segmentation {
        sample: FunctionalSample::new(curves, tau, origin)?,
        dropped_head,
    })
}

/// Applies the difference operator (1−B)^d; output is `d` entries shorter.
pub fn difference(series: &[f64], d: usize) -> Result<Vec<f64>, SeriesError> {
    if d >= series.len() {
        return Err(SeriesError::DifferenceOrder {
            d,
            len: series.len(),
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Differences `d` times, also returning the leading value dropped at each
/// level; feed those heads to [`integrate`] to reconstruct the original.
pub fn difference_with_heads(
    series: &[f64],
    d: usize,
) -> Result<(Vec<f64>, Vec<f64>), SeriesError> {
    if d >= series.len() {
        return Err(SeriesError::DifferenceOrder {
            d,
            len: series.len(),
        });
    }
    let mut heads = Vec::with_capacity(d);
    let mut out = series.to_vec();
    for _ in 0..d {
        heads.push(out[0]);
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok((out, heads))
}

/// Inverse of [`difference`]: rebuilds the original sequence from the
/// d-times-differenced values and the stored per-level heads.
pub fn integrate(diffed: &[f64], d: usize, heads: &[f64]) -> Result<Vec<f64>, SeriesError> {
    if heads.len() != d {
        return Err(SeriesError::HeadCount {
            expected: d,
            got: heads.len(),
        });
    }
    let mut out = diffed.to_vec();
    for level in (0..d).rev() {
        let mut rebuilt = Vec::with_capacity(out.len() + 1);
        rebuilt.push(heads[level]);
        for v in &out {
            rebuilt.push(rebuilt.last().unwrap() + v);
        }
        out = rebuilt;
    }
    Ok(out)
}
