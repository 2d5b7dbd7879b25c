//! Side-by-side evaluation of the three forecasters on a fixed split. Every
//! (region, method) cell trains on the window ending at `train_end` and is
//! scored on the following `horizon` months.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{flag_best, EvaluationReport, Method, MethodOutcome, ReportRow};
use super::{nse, nse_against, rmse, AlignedDataset, EvalError, NseReference, SplitSpec};
use crate::arima::{
    fit_arima, fit_arimax, forecast, forecast_arimax, select_order, ArimaSpec, CovariateLag,
    SelectOptions,
};
use crate::calendar::CalendarMonth;
use crate::series::{segment, TimeSeries};
use crate::sfplr::{
    build_dataset, cv_bandwidth, default_bandwidth_grid, prediction_row, CovariateMatrix,
    CovariateMode, Kernel, SemiMetric, SemiMetricSpec, SfplrModel, TargetSpec,
};
use crate::transform::box_cox_mle;

/// Order-search bounds for the univariate model; the same selected order
/// seeds the covariate model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaConfig {
    pub p_max: usize,
    pub q_max: usize,
    pub d_max: usize,
    pub use_boxcox: bool,
}

impl Default for ArimaConfig {
    fn default() -> Self {
        Self {
            p_max: 5,
            q_max: 5,
            d_max: 2,
            use_boxcox: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaxConfig {
    /// Regression terms; an empty list means every dataset covariate enters
    /// at lag 0.
    pub covariate_lags: Vec<CovariateLag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfplrConfig {
    pub metric: SemiMetricSpec,
    pub kernel: Kernel,
    /// Curve length in months.
    pub tau: usize,
    pub covariate_mode: CovariateMode,
    /// Bandwidth candidates; None builds a default grid per target.
    pub h_grid: Option<Vec<f64>>,
}

impl Default for SfplrConfig {
    fn default() -> Self {
        Self {
            metric: SemiMetricSpec::EuclidGrid,
            kernel: Kernel::default(),
            tau: 12,
            covariate_mode: CovariateMode::default(),
            h_grid: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub arima: ArimaConfig,
    pub arimax: ArimaxConfig,
    pub sfplr: SfplrConfig,
    pub nse_reference: NseReference,
}

/// Fits and scores all methods on all regions. Cells evaluate independently
/// (in parallel) and a cell's failure becomes its row's marker rather than
/// aborting the run; rows keep a fixed (region, method) order either way.
pub fn run_comparison(
    data: &AlignedDataset,
    split: &SplitSpec,
    config: &ComparisonConfig,
) -> Result<EvaluationReport, EvalError> {
    if data.regions.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let (_, test_end) = split.test_window();
    for (name, series) in &data.regions {
        split.validate(series.start(), config.sfplr.tau)?;
        if series.end() < test_end {
            return Err(EvalError::UncoveredTestWindow {
                region: name.clone(),
                needed: test_end,
                end: series.end(),
            });
        }
    }

    let cells: Vec<(usize, Method)> = (0..data.regions.len())
        .flat_map(|r| Method::ALL.iter().map(move |&m| (r, m)))
        .collect();
    let mut rows: Vec<ReportRow> = cells
        .par_iter()
        .map(|&(region, method)| {
            let (name, series) = &data.regions[region];
            ReportRow {
                region: name.clone(),
                method,
                outcome: score_cell(data, series, split, config, method)
                    .map_err(|e| e.to_string()),
            }
        })
        .collect();
    flag_best(&mut rows);
    Ok(EvaluationReport { rows })
}

fn score_cell(
    data: &AlignedDataset,
    series: &TimeSeries,
    split: &SplitSpec,
    config: &ComparisonConfig,
    method: Method,
) -> Result<MethodOutcome, EvalError> {
    let (test_start, test_end) = split.test_window();
    let observed = series.window(test_start, test_end)?.dense()?;
    let predictions = match method {
        Method::Arima => arima_forecasts(series, split, &config.arima)?,
        Method::Arimax => arimax_forecasts(data, series, split, config)?,
        Method::Sfplr => sfplr_forecasts(data, series, split, &config.sfplr)?,
    };
    let nse_value = match config.nse_reference {
        NseReference::TestMean => nse(&predictions, &observed)?,
        NseReference::TrainingMean => {
            let train = series.window(series.start(), split.train_end)?.dense()?;
            let mean = train.iter().sum::<f64>() / train.len() as f64;
            nse_against(&predictions, &observed, mean)?
        }
    };
    let rmse_value = rmse(&predictions, &observed)?;
    if !nse_value.is_finite() || !rmse_value.is_finite() {
        return Err(EvalError::NonFiniteForecast);
    }
    Ok(MethodOutcome {
        nse: nse_value,
        rmse: rmse_value,
        predictions,
        observed,
        best_nse: false,
        best_rmse: false,
    })
}

/// Orders are identified on the same scale the model is then fit on.
pub fn choose_order(train: &TimeSeries, config: &ArimaConfig) -> Result<ArimaSpec, EvalError> {
    let values = train.dense()?;
    let scan = if config.use_boxcox {
        box_cox_mle(&values)?.apply(&values)?
    } else {
        values
    };
    let options = SelectOptions {
        p_max: config.p_max,
        q_max: config.q_max,
        d_max: config.d_max,
        ..SelectOptions::default()
    };
    Ok(select_order(&scan, &options)?.spec.with_boxcox(config.use_boxcox))
}

fn arima_forecasts(
    series: &TimeSeries,
    split: &SplitSpec,
    config: &ArimaConfig,
) -> Result<Vec<f64>, EvalError> {
    let train = series.window(series.start(), split.train_end)?;
    let spec = choose_order(&train, config)?;
    let model = fit_arima(&train, spec)?;
    Ok(forecast(&model, split.horizon)?)
}

fn arimax_forecasts(
    data: &AlignedDataset,
    series: &TimeSeries,
    split: &SplitSpec,
    config: &ComparisonConfig,
) -> Result<Vec<f64>, EvalError> {
    let train = series.window(series.start(), split.train_end)?;
    let spec = choose_order(&train, &config.arima)?;
    let train_cov = covariate_matrix(data, series.start(), split.train_end, train.len())?;
    let (test_start, test_end) = split.test_window();
    let future = covariate_matrix(data, test_start, test_end, split.horizon)?;
    let lags = if config.arimax.covariate_lags.is_empty() {
        (0..data.covariates.len())
            .map(CovariateLag::contemporaneous)
            .collect()
    } else {
        config.arimax.covariate_lags.clone()
    };
    let model = fit_arimax(&train, &train_cov, spec, &lags)?;
    Ok(forecast_arimax(&model, &future, split.horizon)?)
}

fn covariate_matrix(
    data: &AlignedDataset,
    from: CalendarMonth,
    to: CalendarMonth,
    n_rows: usize,
) -> Result<CovariateMatrix, EvalError> {
    if data.covariates.is_empty() {
        return Ok(CovariateMatrix::empty(n_rows));
    }
    let names = data.covariates.iter().map(|(n, _)| n.clone()).collect();
    let columns = data
        .covariates
        .iter()
        .map(|(_, s)| Ok(s.window(from, to)?.dense()?))
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(CovariateMatrix::new(names, columns)?)
}

/// One curve-based model per horizon month: the last training curve and the
/// covariate row for the upcoming month predict that month's value.
fn sfplr_forecasts(
    data: &AlignedDataset,
    series: &TimeSeries,
    split: &SplitSpec,
    config: &SfplrConfig,
) -> Result<Vec<f64>, EvalError> {
    let train = series.window(series.start(), split.train_end)?;
    let sample = segment(&train, config.tau)?.sample;
    let last_curve = sample.curve(sample.n() - 1).to_vec();
    let mut predictions = Vec::with_capacity(split.horizon);
    for month in 0..split.horizon {
        let target = TargetSpec::MonthValue { month_index: month };
        let ds = build_dataset(&sample, &data.covariates, target, config.covariate_mode)?;
        let metric = SemiMetric::fitted(config.metric, &ds.curves)?;
        let grid = match &config.h_grid {
            Some(grid) => grid.clone(),
            None => default_bandwidth_grid(&ds.curves, &metric)?,
        };
        let h = cv_bandwidth(&ds.x, &ds.z, &ds.curves, config.kernel, &metric, &grid)?;
        let model = SfplrModel::fit(&ds.curves, &ds.x, &ds.z, h, config.kernel, metric, target)?;
        let x_new = prediction_row(&sample, &data.covariates, target, config.covariate_mode)?;
        predictions.push(model.predict(&x_new, &last_curve)?.value);
    }
    Ok(predictions)
}
