//! Assembly of (predictor curve, covariate row, response) training triples
//! from a curve sample and per-covariate monthly series.

use serde::{Deserialize, Serialize};

use super::{CovariateMatrix, SfplrError};
use crate::calendar::CalendarMonth;
use crate::series::{FunctionalSample, TimeSeries};

/// The scalar characteristic G extracted from the response period's curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TargetSpec {
    /// Value of one month within the period.
    MonthValue { month_index: usize },
    /// Sum over the whole period.
    PeriodSum,
    /// Maximum over the whole period.
    PeriodMax,
}

impl TargetSpec {
    pub fn apply(self, curve: &[f64]) -> f64 {
        match self {
            TargetSpec::MonthValue { month_index } => curve[month_index],
            TargetSpec::PeriodSum => curve.iter().sum(),
            TargetSpec::PeriodMax => curve.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn validate(self, tau: usize) -> Result<(), SfplrError> {
        if let TargetSpec::MonthValue { month_index } = self {
            if month_index >= tau {
                return Err(SfplrError::BadTargetMonth { month_index, tau });
            }
        }
        Ok(())
    }
}

/// Which period's covariate values accompany predictor curve i when the
/// response is read from period i+1: the response period's own values
/// (contemporaneous, requires observed test-period covariates at prediction
/// time) or the predictor period's values (strictly causal).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariateMode {
    #[default]
    Contemporaneous,
    SameMonthPriorYear,
}

/// Training data for one SFPLR model: n−1 predictor curves with their
/// covariate rows and responses.
#[derive(Debug, Clone, PartialEq)]
pub struct SfplrDataset {
    pub curves: FunctionalSample,
    pub x: CovariateMatrix,
    pub z: Vec<f64>,
}

/// Builds the n−1 training triples (Y_i, X_i, Z_i = G of period i+1) from n
/// consecutive curves. Covariate series are addressed by calendar month, so
/// they may start and end anywhere as long as they cover the needed months.
pub fn build_dataset(
    curves: &FunctionalSample,
    covariates: &[(String, TimeSeries)],
    target: TargetSpec,
    mode: CovariateMode,
) -> Result<SfplrDataset, SfplrError> {
    let n = curves.n();
    if n < 3 {
        return Err(SfplrError::TooFewCurves { n });
    }
    target.validate(curves.tau())?;
    let triples = n - 1;

    let z: Vec<f64> = (0..triples)
        .map(|i| target.apply(curves.curve(i + 1)))
        .collect();

    let mut names = Vec::with_capacity(covariates.len());
    let mut columns = Vec::with_capacity(covariates.len());
    for (name, series) in covariates {
        let column = (0..triples)
            .map(|i| covariate_value(series, name, target, curves, covariate_period(mode, i)))
            .collect::<Result<Vec<f64>, SfplrError>>()?;
        names.push(name.clone());
        columns.push(column);
    }

    let x = if columns.is_empty() {
        CovariateMatrix::empty(triples)
    } else {
        CovariateMatrix::new(names, columns)?
    };
    let train_curves = FunctionalSample::new(
        curves.curves()[..triples].to_vec(),
        curves.tau(),
        curves.origin(),
    )?;
    Ok(SfplrDataset {
        curves: train_curves,
        x,
        z,
    })
}

/// Covariate row for predicting the period following the last curve in
/// `curves` (the row paired with that last curve as predictor). Under
/// `Contemporaneous` the series must extend into the predicted period.
pub fn prediction_row(
    curves: &FunctionalSample,
    covariates: &[(String, TimeSeries)],
    target: TargetSpec,
    mode: CovariateMode,
) -> Result<Vec<f64>, SfplrError> {
    target.validate(curves.tau())?;
    let period = covariate_period(mode, curves.n() - 1);
    covariates
        .iter()
        .map(|(name, series)| covariate_value(series, name, target, curves, period))
        .collect()
}

/// Period whose months supply the covariates for predictor curve `i`.
fn covariate_period(mode: CovariateMode, i: usize) -> usize {
    match mode {
        CovariateMode::Contemporaneous => i + 1,
        CovariateMode::SameMonthPriorYear => i,
    }
}

/// Reads the covariate for one period, aggregated the same way as the
/// target: the target month's value for a monthly target, the period sum or
/// maximum otherwise.
fn covariate_value(
    series: &TimeSeries,
    name: &str,
    target: TargetSpec,
    curves: &FunctionalSample,
    period: usize,
) -> Result<f64, SfplrError> {
    match target {
        TargetSpec::MonthValue { month_index } => {
            lookup(series, name, curves.month_of(period, month_index))
        }
        TargetSpec::PeriodSum => (0..curves.tau())
            .map(|j| lookup(series, name, curves.month_of(period, j)))
            .sum(),
        TargetSpec::PeriodMax => {
            let mut best = f64::NEG_INFINITY;
            for j in 0..curves.tau() {
                best = best.max(lookup(series, name, curves.month_of(period, j))?);
            }
            Ok(best)
        }
    }
}

fn lookup(series: &TimeSeries, name: &str, month: CalendarMonth) -> Result<f64, SfplrError> {
    let offset = month.months_since(series.start());
    let gap = || SfplrError::CovariateGap {
        name: name.to_owned(),
        month,
    };
    if offset < 0 || offset as usize >= series.len() {
        return Err(gap());
    }
    series.values()[offset as usize].ok_or_else(gap)
}
