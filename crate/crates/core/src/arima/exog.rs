//! Regression with ARIMA errors: the response and covariates are differenced
//! together, a linear covariate term is subtracted, and the remainder is
//! modeled by the CSS ARMA machinery.

use serde::{Deserialize, Serialize};

use super::css::{css_residuals, loglik_aicc, minimize, pacf_to_coeffs, pacf_to_ma_coeffs};
use super::{finish_forecast, fit_arima, forecast, ArimaError, ArimaModel, ArimaSpec};
use crate::linalg::lstsq;
use crate::series::{difference, difference_with_heads, TimeSeries};
use crate::sfplr::CovariateMatrix;
use crate::transform::box_cox_mle;

const COLLINEARITY_LIMIT: f64 = 1e10;

/// One regression term: covariate column `covariate` delayed by `lag` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovariateLag {
    pub covariate: usize,
    pub lag: usize,
}

impl CovariateLag {
    pub fn contemporaneous(covariate: usize) -> Self {
        Self { covariate, lag: 0 }
    }
}

/// An ARIMA model with a finite-lag covariate regression term.
#[derive(Debug, Clone)]
pub struct ArimaxModel {
    pub base: ArimaModel,
    /// One coefficient per covariate-lag pair, on the differenced scale.
    pub beta_x: Vec<f64>,
    pub covariate_lags: Vec<CovariateLag>,
    /// Training covariates on the original scale, kept so future columns can
    /// be differenced continuously across the training boundary.
    pub train_covariates: CovariateMatrix,
    /// Regression-adjusted differenced series the ARMA part was fit on; it
    /// starts max-lag steps into `base.differenced`.
    pub adjusted: Vec<f64>,
}

/// Jointly fits the regression coefficients and the ARMA error structure by
/// CSS. Covariates are differenced d times alongside the response; the
/// residual window starts after the largest requested lag.
pub fn fit_arimax(
    series: &TimeSeries,
    covariates: &CovariateMatrix,
    spec: ArimaSpec,
    covariate_lags: &[CovariateLag],
) -> Result<ArimaxModel, ArimaError> {
    if spec.d > 2 {
        return Err(ArimaError::UnsupportedDifferencing(spec.d));
    }
    let values = series.dense()?;
    if covariates.n_rows() != values.len() {
        return Err(ArimaError::CovariateRows {
            needed: values.len(),
            got: covariates.n_rows(),
        });
    }
    for term in covariate_lags {
        if term.covariate >= covariates.n_cols() {
            return Err(ArimaError::LagOutOfRange {
                index: term.covariate,
                n_cols: covariates.n_cols(),
            });
        }
    }

    if covariate_lags.is_empty() {
        // no regression part: defer to the plain fit so the reduction is exact
        let base = fit_arima(series, spec)?;
        let adjusted = base.differenced.clone();
        return Ok(ArimaxModel {
            base,
            beta_x: Vec::new(),
            covariate_lags: Vec::new(),
            train_covariates: covariates.clone(),
            adjusted,
        });
    }

    let (boxcox, z) = if spec.use_boxcox {
        let transform = box_cox_mle(&values)?;
        let transformed = transform.apply(&values)?;
        (Some(transform), transformed)
    } else {
        (None, values)
    };
    let (w, heads) = difference_with_heads(&z, spec.d)?;

    let diffed_cov = difference_columns(covariates, None, spec.d, covariate_lags, 0)?;
    let t0 = covariate_lags.iter().map(|t| t.lag).max().unwrap_or(0);
    let n = w.len();
    if n <= t0 {
        return Err(ArimaError::InsufficientData {
            needed: t0 + 1,
            got: n,
        });
    }
    let n_eff = n - t0;
    let (p, q) = (spec.p, spec.q);
    let needed = 10 * (p + q + 1);
    if n_eff < needed {
        return Err(ArimaError::InsufficientData {
            needed,
            got: n_eff,
        });
    }

    let m = covariate_lags.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(m);
    for term in covariate_lags {
        let source = diffed_cov[term.covariate]
            .as_ref()
            .expect("every referenced covariate was differenced");
        columns.push((0..n_eff).map(|s| source[s + t0 - term.lag]).collect());
    }
    // regression parameters are optimized per unit of column spread so the
    // simplex step suits any covariate scale
    let mut scales = Vec::with_capacity(m);
    for col in &columns {
        let rms = (col.iter().map(|v| v * v).sum::<f64>() / n_eff as f64).sqrt();
        if rms == 0.0 {
            return Err(ArimaError::Collinear {
                condition: f64::INFINITY,
            });
        }
        scales.push(rms);
    }

    let include_mean = spec.d == 0;
    let w_eff = &w[t0..];
    let beta_init = initial_beta(w_eff, &columns, include_mean)?;

    let wbar = w_eff.iter().sum::<f64>() / n_eff as f64;
    let sd = (w_eff.iter().map(|v| (v - wbar).powi(2)).sum::<f64>() / n_eff as f64).sqrt();
    let mean_scale = if sd > 0.0 { sd } else { 1.0 };

    let offset = usize::from(include_mean);
    let dim = offset + p + q + m;
    let mut x0 = vec![0.0; dim];
    for (k, b) in beta_init.iter().enumerate() {
        x0[offset + p + q + k] = b * scales[k];
    }

    let mut r = vec![0.0; n_eff];
    let mut ebuf = Vec::with_capacity(n_eff);
    let decode_and_score = |params: &[f64], r: &mut Vec<f64>, ebuf: &mut Vec<f64>| {
        let phi = pacf_to_coeffs(&params[offset..offset + p]);
        let theta = pacf_to_ma_coeffs(&params[offset + p..offset + p + q]);
        let beta_scaled = &params[offset + p + q..];
        for (s, rv) in r.iter_mut().enumerate() {
            let mut v = w_eff[s];
            for (k, col) in columns.iter().enumerate() {
                v -= beta_scaled[k] / scales[k] * col[s];
            }
            *rv = v;
        }
        let rbar = r.iter().sum::<f64>() / n_eff as f64;
        let mu = if include_mean {
            rbar + mean_scale * params[0]
        } else {
            0.0
        };
        let css = css_residuals(r, rbar, mu, &phi, &theta, ebuf);
        (css, mu, phi, theta)
    };

    let minimum = {
        let mut objective = |params: &[f64]| decode_and_score(params, &mut r, &mut ebuf).0;
        minimize(&mut objective, &x0)?
    };

    let (css, mu, phi, theta) = decode_and_score(&minimum.x, &mut r, &mut ebuf);
    let beta_x: Vec<f64> = minimum.x[offset + p + q..]
        .iter()
        .zip(&scales)
        .map(|(b, s)| b / s)
        .collect();

    let sigma2 = css / n_eff as f64;
    let floor = (1e-12 * (1.0 + wbar.abs())).powi(2);
    if sigma2 <= floor {
        return Err(ArimaError::DegenerateFit);
    }
    let k_params = p + q + m + offset;
    let (loglik, aicc) = loglik_aicc(css, n_eff, k_params);

    let base = ArimaModel {
        spec,
        phi,
        theta,
        intercept: mu,
        sigma2,
        loglik,
        aicc,
        boxcox,
        heads,
        differenced: w,
        residuals: ebuf,
    };
    Ok(ArimaxModel {
        base,
        beta_x,
        covariate_lags: covariate_lags.to_vec(),
        train_covariates: covariates.clone(),
        adjusted: r,
    })
}

/// Point forecasts with the covariate term extended by supplied future
/// values, which are differenced continuously across the training boundary.
pub fn forecast_arimax(
    model: &ArimaxModel,
    future_covariates: &CovariateMatrix,
    horizon: usize,
) -> Result<Vec<f64>, ArimaError> {
    if horizon == 0 {
        return Err(ArimaError::ZeroHorizon);
    }
    if model.covariate_lags.is_empty() {
        return forecast(&model.base, horizon);
    }
    let train = &model.train_covariates;
    if future_covariates.names() != train.names() {
        return Err(ArimaError::CovariateMismatch {
            expected: train.names().to_vec(),
            got: future_covariates.names().to_vec(),
        });
    }
    if future_covariates.n_rows() < horizon {
        return Err(ArimaError::MissingFutureCovariates {
            needed: horizon,
            got: future_covariates.n_rows(),
        });
    }

    let d = model.base.spec.d;
    let extended = difference_columns(
        train,
        Some(future_covariates),
        d,
        &model.covariate_lags,
        horizon,
    )?;

    let n = model.base.differenced.len();
    let n_eff = model.adjusted.len();
    let rbar = model.adjusted.iter().sum::<f64>() / n_eff as f64;
    let mu = model.base.intercept;

    let mut rx = model.adjusted.clone();
    rx.reserve(horizon);
    let mut future_w = Vec::with_capacity(horizon);
    for k in 0..horizon {
        let a = n_eff + k;
        let mut r = mu;
        for (i, ph) in model.base.phi.iter().enumerate() {
            let s = a as i64 - 1 - i as i64;
            let lagged = if s < 0 { rbar } else { rx[s as usize] };
            r += ph * (lagged - mu);
        }
        for (j, th) in model.base.theta.iter().enumerate() {
            let s = a as i64 - 1 - j as i64;
            if s >= 0 && (s as usize) < n_eff {
                r += th * model.base.residuals[s as usize];
            }
        }
        rx.push(r);

        let t = n + k;
        let mut w_value = r;
        for (term, beta) in model.covariate_lags.iter().zip(&model.beta_x) {
            let source = extended[term.covariate]
                .as_ref()
                .expect("every referenced covariate was differenced");
            w_value += beta * source[t - term.lag];
        }
        future_w.push(w_value);
    }
    finish_forecast(&model.base, future_w)
}

/// Differences each covariate column referenced by `terms` d times, with
/// optional future rows appended first so the boundary is continuous.
fn difference_columns(
    train: &CovariateMatrix,
    future: Option<&CovariateMatrix>,
    d: usize,
    terms: &[CovariateLag],
    horizon: usize,
) -> Result<Vec<Option<Vec<f64>>>, ArimaError> {
    let mut out: Vec<Option<Vec<f64>>> = vec![None; train.n_cols()];
    for term in terms {
        if out[term.covariate].is_some() {
            continue;
        }
        let mut column = train.column(term.covariate).to_vec();
        if let Some(fut) = future {
            column.extend_from_slice(&fut.column(term.covariate)[..horizon]);
        }
        out[term.covariate] = Some(difference(&column, d)?);
    }
    Ok(out)
}

/// OLS of the differenced response on the differenced covariate columns,
/// used to start the joint optimization; also the collinearity gate.
fn initial_beta(
    w_eff: &[f64],
    columns: &[Vec<f64>],
    include_mean: bool,
) -> Result<Vec<f64>, ArimaError> {
    let n = w_eff.len();
    let m = columns.len();
    let p_design = m + usize::from(include_mean);
    if n < p_design {
        return Err(ArimaError::InsufficientData {
            needed: p_design,
            got: n,
        });
    }
    let mut design = Vec::with_capacity(n * p_design);
    for s in 0..n {
        if include_mean {
            design.push(1.0);
        }
        for col in columns {
            design.push(col[s]);
        }
    }
    let solution = lstsq(&design, n, p_design, w_eff).ok_or(ArimaError::Collinear {
        condition: f64::INFINITY,
    })?;
    let condition = solution.condition();
    if condition > COLLINEARITY_LIMIT {
        return Err(ArimaError::Collinear { condition });
    }
    Ok(solution.coef[usize::from(include_mean)..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::CalendarMonth;
    use rand::{Rng, SeedableRng};

    fn series_from(values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(CalendarMonth::new(2010, 1).unwrap(), values.to_vec()).unwrap()
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect()
    }

    #[test]
    fn all_zero_covariate_is_rejected_as_collinear() {
        let y = noise(1, 80);
        let x = CovariateMatrix::new(vec!["zero".into()], vec![vec![0.0; 80]]).unwrap();
        let err = fit_arimax(
            &series_from(&y),
            &x,
            ArimaSpec::new(0, 0, 0),
            &[CovariateLag::contemporaneous(0)],
        )
        .unwrap_err();
        assert!(matches!(err, ArimaError::Collinear { .. }), "{err}");
    }

    #[test]
    fn duplicated_covariate_is_rejected_as_collinear() {
        let y = noise(2, 80);
        let x = noise(3, 80);
        let m = CovariateMatrix::new(vec!["a".into(), "b".into()], vec![x.clone(), x]).unwrap();
        let err = fit_arimax(
            &series_from(&y),
            &m,
            ArimaSpec::new(0, 0, 0),
            &[
                CovariateLag::contemporaneous(0),
                CovariateLag::contemporaneous(1),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, ArimaError::Collinear { .. }), "{err}");
    }

    #[test]
    fn lag_referencing_a_missing_column_is_rejected() {
        let y = noise(4, 60);
        let x = CovariateMatrix::new(vec!["a".into()], vec![noise(5, 60)]).unwrap();
        let err = fit_arimax(
            &series_from(&y),
            &x,
            ArimaSpec::new(0, 0, 0),
            &[CovariateLag::contemporaneous(1)],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ArimaError::LagOutOfRange { index: 1, n_cols: 1 }
        ));
    }

    #[test]
    fn covariate_row_count_must_match_the_series() {
        let y = noise(6, 60);
        let x = CovariateMatrix::new(vec!["a".into()], vec![noise(7, 59)]).unwrap();
        let err = fit_arimax(
            &series_from(&y),
            &x,
            ArimaSpec::new(0, 0, 0),
            &[CovariateLag::contemporaneous(0)],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ArimaError::CovariateRows {
                needed: 60,
                got: 59
            }
        ));
    }

    #[test]
    fn pure_regression_matches_least_squares() {
        let n = 120;
        let x = noise(8, n);
        let e = noise(9, n);
        let y: Vec<f64> = x
            .iter()
            .zip(&e)
            .map(|(xv, ev)| 3.0 + 2.0 * xv + 0.05 * ev)
            .collect();
        let covariates = CovariateMatrix::new(vec!["x".into()], vec![x.clone()]).unwrap();
        let model = fit_arimax(
            &series_from(&y),
            &covariates,
            ArimaSpec::new(0, 0, 0),
            &[CovariateLag::contemporaneous(0)],
        )
        .unwrap();

        // direct least-squares oracle
        let mut design = Vec::with_capacity(n * 2);
        for xv in &x {
            design.push(1.0);
            design.push(*xv);
        }
        let ols = lstsq(&design, n, 2, &y).unwrap();
        assert!(
            (model.beta_x[0] - ols.coef[1]).abs() < 1e-6,
            "beta {} vs OLS {}",
            model.beta_x[0],
            ols.coef[1]
        );
        assert!((model.base.intercept - ols.coef[0]).abs() < 1e-6);

        // with no AR/MA structure the forecast is exactly intercept + beta x
        let future =
            CovariateMatrix::new(vec!["x".into()], vec![vec![0.4, -1.3, 2.2]]).unwrap();
        let fc = forecast_arimax(&model, &future, 3).unwrap();
        for (f, xv) in fc.iter().zip([0.4, -1.3, 2.2]) {
            let expected = model.base.intercept + model.beta_x[0] * xv;
            assert!((f - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_beta_reduces_to_the_base_forecast() {
        let n = 150;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let mut y = vec![0.0; n];
        for t in 1..n {
            y[t] = 0.7 * y[t - 1] + rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let base = fit_arima(&series_from(&y), ArimaSpec::new(1, 0, 1)).unwrap();
        let x = noise(11, n);
        let model = ArimaxModel {
            adjusted: base.differenced.clone(),
            base,
            beta_x: vec![0.0],
            covariate_lags: vec![CovariateLag::contemporaneous(0)],
            train_covariates: CovariateMatrix::new(vec!["x".into()], vec![x]).unwrap(),
        };
        let future = CovariateMatrix::new(vec!["x".into()], vec![noise(12, 12)]).unwrap();
        let with_zero_beta = forecast_arimax(&model, &future, 12).unwrap();
        let plain = forecast(&model.base, 12).unwrap();
        for (a, b) in with_zero_beta.iter().zip(&plain) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn future_covariates_shorter_than_the_horizon_are_rejected() {
        let n = 120;
        let x = noise(13, n);
        let e = noise(14, n);
        let y: Vec<f64> = x.iter().zip(&e).map(|(xv, ev)| 2.0 * xv + ev).collect();
        let covariates = CovariateMatrix::new(vec!["x".into()], vec![x]).unwrap();
        let model = fit_arimax(
            &series_from(&y),
            &covariates,
            ArimaSpec::new(0, 0, 0),
            &[CovariateLag::contemporaneous(0)],
        )
        .unwrap();
        let future = CovariateMatrix::new(vec!["x".into()], vec![noise(15, 5)]).unwrap();
        let err = forecast_arimax(&model, &future, 12).unwrap_err();
        assert!(matches!(
            err,
            ArimaError::MissingFutureCovariates { needed: 12, got: 5 }
        ));
    }
}
