//! Conditional-sum-of-squares ARMA estimation.
//!
//! The objective conditions on the sample start: residuals before it are
//! zero and observations before it sit at the sample mean. Coefficients are
//! reparametrized through bounded partial autocorrelations, so every point
//! the optimizer visits is stationary (AR) and invertible (MA) by
//! construction.

use super::optim::{nelder_mead, Minimum};
use super::ArimaError;

/// Partial autocorrelations are kept strictly inside (-1, 1) so the implied
/// polynomial roots stay off the unit circle.
const PACF_BOUND: f64 = 1.0 - 1e-6;
pub(crate) const MAX_ITER: usize = 2000;
const REL_TOL: f64 = 1e-8;
const SIMPLEX_STEP: f64 = 0.1;

/// Maps unconstrained parameters to a stationary AR coefficient vector by
/// treating tanh of each parameter as a partial autocorrelation and running
/// the Durbin-Levinson recursion.
pub(crate) fn pacf_to_coeffs(raw: &[f64]) -> Vec<f64> {
    let m = raw.len();
    let mut coeffs: Vec<f64> = raw.iter().map(|r| PACF_BOUND * r.tanh()).collect();
    let mut work = coeffs.clone();
    for j in 1..m {
        let a = coeffs[j];
        for k in 0..j {
            work[k] = coeffs[k] - a * coeffs[j - 1 - k];
        }
        coeffs[..j].copy_from_slice(&work[..j]);
    }
    coeffs
}

/// MA coefficients in the `+ theta` convention: negating a stationary vector
/// gives exactly the invertible region of `1 + θ_1 z + ... + θ_q z^q`.
pub(crate) fn pacf_to_ma_coeffs(raw: &[f64]) -> Vec<f64> {
    let mut coeffs = pacf_to_coeffs(raw);
    for c in &mut coeffs {
        *c = -*c;
    }
    coeffs
}

/// One-step residuals of the ARMA recursion
/// `e_t = (w_t - mu) - Σ φ_i (w_{t-i} - mu) - Σ θ_j e_{t-j}`,
/// with observations before the sample start held at `presample` and
/// presample residuals at zero. Returns the sum of squared residuals.
pub(crate) fn css_residuals(
    w: &[f64],
    presample: f64,
    mu: f64,
    phi: &[f64],
    theta: &[f64],
    resid: &mut Vec<f64>,
) -> f64 {
    resid.clear();
    let mut css = 0.0;
    for t in 0..w.len() {
        let mut e = w[t] - mu;
        for (i, ph) in phi.iter().enumerate() {
            let lagged = if t > i { w[t - 1 - i] } else { presample };
            e -= ph * (lagged - mu);
        }
        for (j, th) in theta.iter().enumerate() {
            if t > j {
                e -= th * resid[t - 1 - j];
            }
        }
        resid.push(e);
        css += e * e;
    }
    css
}

/// Gaussian log-likelihood of the CSS fit and its small-sample AIC.
pub(crate) fn loglik_aicc(css: f64, n: usize, k: usize) -> (f64, f64) {
    let n_f = n as f64;
    let sigma2 = css / n_f;
    let loglik = -0.5 * n_f * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
    let aicc = if n > k + 1 {
        -2.0 * loglik + 2.0 * (k as f64) * n_f / (n_f - k as f64 - 1.0)
    } else {
        f64::INFINITY
    };
    (loglik, aicc)
}

/// Runs the simplex on `objective`, restarting once from a perturbed initial
/// point if the first attempt stalls.
pub(crate) fn minimize<F>(objective: &mut F, x0: &[f64]) -> Result<Minimum, ArimaError>
where
    F: FnMut(&[f64]) -> f64,
{
    let first = nelder_mead(objective, x0, SIMPLEX_STEP, MAX_ITER, REL_TOL);
    if first.converged {
        return Ok(first);
    }
    let perturbed: Vec<f64> = x0
        .iter()
        .enumerate()
        .map(|(i, v)| v + if i % 2 == 0 { 0.25 } else { -0.25 })
        .collect();
    let second = nelder_mead(objective, &perturbed, SIMPLEX_STEP, MAX_ITER, REL_TOL);
    if second.converged {
        Ok(second)
    } else {
        Err(ArimaError::NonConvergence { max_iter: MAX_ITER })
    }
}

#[derive(Debug, Clone)]
pub struct ArmaFit {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Process mean; zero when the model is fit without one.
    pub intercept: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub aicc: f64,
    pub residuals: Vec<f64>,
}

/// Fits a stationary ARMA(p, q) with mean by conditional sum of squares.
pub fn fit_arma(w: &[f64], p: usize, q: usize) -> Result<ArmaFit, ArimaError> {
    fit_arma_with(w, p, q, true)
}

/// As [`fit_arma`], with the mean optionally suppressed (used after
/// differencing, where a free mean would re-introduce drift).
pub(crate) fn fit_arma_with(
    w: &[f64],
    p: usize,
    q: usize,
    include_mean: bool,
) -> Result<ArmaFit, ArimaError> {
    if let Some(index) = w.iter().position(|v| !v.is_finite()) {
        return Err(ArimaError::NonFiniteInput { index });
    }
    let n = w.len();
    let needed = 10 * (p + q + 1);
    if n < needed {
        return Err(ArimaError::InsufficientData { needed, got: n });
    }

    let n_f = n as f64;
    let wbar = w.iter().sum::<f64>() / n_f;
    let sd = (w.iter().map(|v| (v - wbar).powi(2)).sum::<f64>() / n_f).sqrt();
    // the mean offset is optimized in units of the sample spread so the
    // simplex step suits any data scale (and shifts of w cancel exactly)
    let mean_scale = if sd > 0.0 { sd } else { 1.0 };

    let dim = usize::from(include_mean) + p + q;
    let mut resid = Vec::with_capacity(n);
    let (params, css) = if dim == 0 {
        let css = css_residuals(w, wbar, 0.0, &[], &[], &mut resid);
        (Vec::new(), css)
    } else {
        let mut buf = Vec::with_capacity(n);
        let mut objective = |params: &[f64]| {
            let (mu, rest) = split_mean(params, include_mean, wbar, mean_scale);
            let phi = pacf_to_coeffs(&rest[..p]);
            let theta = pacf_to_ma_coeffs(&rest[p..]);
            css_residuals(w, wbar, mu, &phi, &theta, &mut buf)
        };
        let minimum = minimize(&mut objective, &vec![0.0; dim])?;
        (minimum.x, minimum.value)
    };

    let (mu, rest) = split_mean(&params, include_mean, wbar, mean_scale);
    let phi = pacf_to_coeffs(&rest[..p]);
    let theta = pacf_to_ma_coeffs(&rest[p..]);
    let css = if dim == 0 {
        css
    } else {
        css_residuals(w, wbar, mu, &phi, &theta, &mut resid)
    };

    let sigma2 = css / n_f;
    let floor = (1e-12 * (1.0 + wbar.abs())).powi(2);
    if sigma2 <= floor {
        return Err(ArimaError::DegenerateFit);
    }
    let k = p + q + usize::from(include_mean);
    let (loglik, aicc) = loglik_aicc(css, n, k);

    Ok(ArmaFit {
        phi,
        theta,
        intercept: mu,
        sigma2,
        loglik,
        aicc,
        residuals: resid,
    })
}

fn split_mean<'a>(
    params: &'a [f64],
    include_mean: bool,
    wbar: f64,
    mean_scale: f64,
) -> (f64, &'a [f64]) {
    if include_mean {
        (wbar + mean_scale * params[0], &params[1..])
    } else {
        (0.0, params)
    }
}
