//! ARIMA and ARIMAX (regression with ARIMA errors) estimation, automatic
//! order selection, and point forecasting.
//!
//! Estimation minimizes the conditional sum of squares with a simplex
//! optimizer; order selection picks the differencing order with a unit-root
//! test and the (p, q) pair by AICc grid search.

mod css;
mod exog;
mod optim;
mod select;

pub use css::{fit_arma, ArmaFit};
pub use exog::{fit_arimax, forecast_arimax, ArimaxModel, CovariateLag};
pub use select::{select_order, OrderSelection, SelectOptions};

use crate::series::{difference_with_heads, integrate, SeriesError, TimeSeries};
use crate::stationarity::StationarityError;
use crate::transform::{box_cox_mle, BoxCoxTransform, TransformError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArimaError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("unit-root test failed during order selection: {0}")]
    Stationarity(#[from] StationarityError),
    #[error("order needs at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("non-finite value at index {index} of the input")]
    NonFiniteInput { index: usize },
    #[error("optimizer did not converge within {max_iter} iterations (after one restart)")]
    NonConvergence { max_iter: usize },
    #[error("residual variance is numerically zero; the series is degenerate under this model")]
    DegenerateFit,
    #[error("differencing order {0} is not supported (max 2)")]
    UnsupportedDifferencing(usize),
    #[error("every candidate order failed to fit")]
    AllFitsFailed,
    #[error("regression design is collinear (condition estimate {condition:.3e})")]
    Collinear { condition: f64 },
    #[error("covariate matrix has {got} rows but the series has {needed}")]
    CovariateRows { needed: usize, got: usize },
    #[error("covariate lag references column {index}, but the matrix has {n_cols} columns")]
    LagOutOfRange { index: usize, n_cols: usize },
    #[error("future covariates must match the trained ones (expected {expected:?}, got {got:?})")]
    CovariateMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("future covariates cover {got} steps but the horizon needs {needed}")]
    MissingFutureCovariates { needed: usize, got: usize },
    #[error("forecast horizon must be at least 1")]
    ZeroHorizon,
}

/// Model order: AR terms, differences, MA terms, and whether a variance
/// -stabilizing power transform is estimated before differencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(default)]
    pub use_boxcox: bool,
}

impl ArimaSpec {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            use_boxcox: false,
        }
    }

    pub fn with_boxcox(mut self, use_boxcox: bool) -> Self {
        self.use_boxcox = use_boxcox;
        self
    }
}

/// A fitted ARIMA model, carrying the tail state needed to forecast on the
/// original scale.
#[derive(Debug, Clone)]
pub struct ArimaModel {
    pub spec: ArimaSpec,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Mean of the differenced (possibly transformed) series; fixed at 0
    /// when d ≥ 1 so integrated forecasts carry no artificial drift.
    pub intercept: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub aicc: f64,
    pub boxcox: Option<BoxCoxTransform>,
    /// Leading value dropped at each differencing level; together with
    /// `differenced` these reconstruct the (transformed) training series.
    pub heads: Vec<f64>,
    /// The d-times differenced series the ARMA recursion was fit on.
    pub differenced: Vec<f64>,
    /// One-step in-sample residuals aligned with `differenced`.
    pub residuals: Vec<f64>,
}

/// Fits an ARIMA model: optional power transform, d differences, then a CSS
/// ARMA fit. The mean is estimated only for d = 0.
pub fn fit_arima(series: &TimeSeries, spec: ArimaSpec) -> Result<ArimaModel, ArimaError> {
    if spec.d > 2 {
        return Err(ArimaError::UnsupportedDifferencing(spec.d));
    }
    let values = series.dense()?;
    let (boxcox, z) = if spec.use_boxcox {
        let transform = box_cox_mle(&values)?;
        let transformed = transform.apply(&values)?;
        (Some(transform), transformed)
    } else {
        (None, values)
    };
    let (w, heads) = difference_with_heads(&z, spec.d)?;
    let fit = css::fit_arma_with(&w, spec.p, spec.q, spec.d == 0)?;
    Ok(ArimaModel {
        spec,
        phi: fit.phi,
        theta: fit.theta,
        intercept: fit.intercept,
        sigma2: fit.sigma2,
        loglik: fit.loglik,
        aicc: fit.aicc,
        boxcox,
        heads,
        differenced: w,
        residuals: fit.residuals,
    })
}

/// Point forecasts `horizon` steps ahead on the original scale: the ARMA
/// recursion with future shocks at zero, integrated d times and passed back
/// through the inverse transform. Deterministic.
pub fn forecast(model: &ArimaModel, horizon: usize) -> Result<Vec<f64>, ArimaError> {
    if horizon == 0 {
        return Err(ArimaError::ZeroHorizon);
    }
    let w = &model.differenced;
    if w.is_empty() {
        return Err(ArimaError::InsufficientData { needed: 1, got: 0 });
    }
    let n = w.len();
    let presample = w.iter().sum::<f64>() / n as f64;
    let mu = model.intercept;

    let mut extended = w.clone();
    extended.reserve(horizon);
    let mut future = Vec::with_capacity(horizon);
    for t in n..n + horizon {
        let mut value = mu;
        for (i, ph) in model.phi.iter().enumerate() {
            let lagged = if t > i { extended[t - 1 - i] } else { presample };
            value += ph * (lagged - mu);
        }
        for (j, th) in model.theta.iter().enumerate() {
            if t > j && t - 1 - j < n {
                value += th * model.residuals[t - 1 - j];
            }
        }
        extended.push(value);
        future.push(value);
    }
    finish_forecast(model, future)
}

/// Integrates differenced-scale forecasts back to the original scale and
/// inverts the power transform if one was fitted.
fn finish_forecast(model: &ArimaModel, future_w: Vec<f64>) -> Result<Vec<f64>, ArimaError> {
    let d = model.spec.d;
    // last value of each partially-integrated level of the training series
    let mut tails = vec![0.0; d];
    let mut level = model.differenced.clone();
    for lvl in (0..d).rev() {
        level = integrate(&level, 1, &[model.heads[lvl]])?;
        tails[lvl] = *level.last().expect("integration preserves non-emptiness");
    }

    let mut out = Vec::with_capacity(future_w.len());
    for mut value in future_w {
        for lvl in (0..d).rev() {
            value += tails[lvl];
            tails[lvl] = value;
        }
        out.push(value);
    }
    Ok(match &model.boxcox {
        Some(transform) => transform.invert(&out),
        None => out,
    })
}
