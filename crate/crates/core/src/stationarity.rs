//! Augmented Dickey-Fuller unit-root test with a constant and no trend.

use thiserror::Error;

use crate::linalg;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StationarityError {
    #[error("need at least {needed} observations for {lags} lags, got {got}")]
    TooShort {
        needed: usize,
        got: usize,
        lags: usize,
    },
    #[error("significance level {0} is not one of 0.01, 0.05, 0.10")]
    UnsupportedAlpha(f64),
    #[error("test regression is singular (constant or collinear series)")]
    SingularRegression,
}

/// Outcome of the unit-root test.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// t-statistic on the lagged level in the test regression.
    pub statistic: f64,
    /// Number of lagged difference terms included.
    pub lags: usize,
    /// Significance level the decision used.
    pub alpha: f64,
    /// Critical value the statistic was compared against.
    pub critical_value: f64,
    /// True when the unit-root null is rejected, i.e. the series looks
    /// stationary.
    pub reject_unit_root: bool,
}

/// Finite-sample critical values for the constant-only Dickey-Fuller t
/// distribution, rows indexed by sample size. Interpolated linearly in 1/T.
const CRITICAL_ROWS: [(f64, [f64; 3]); 6] = [
    (25.0, [-3.75, -3.00, -2.63]),
    (50.0, [-3.58, -2.93, -2.60]),
    (100.0, [-3.51, -2.89, -2.58]),
    (250.0, [-3.46, -2.88, -2.57]),
    (500.0, [-3.44, -2.87, -2.57]),
    (f64::INFINITY, [-3.43, -2.86, -2.57]),
];

fn alpha_column(alpha: f64) -> Result<usize, StationarityError> {
    for (i, a) in [0.01, 0.05, 0.10].iter().enumerate() {
        if (alpha - a).abs() < 1e-12 {
            return Ok(i);
        }
    }
    Err(StationarityError::UnsupportedAlpha(alpha))
}

/// Critical value at `alpha` for a regression with `t_eff` observations.
pub fn critical_value(alpha: f64, t_eff: usize) -> Result<f64, StationarityError> {
    let col = alpha_column(alpha)?;
    let x = 1.0 / (t_eff as f64).max(1.0);
    // Table rows ordered by T ascending, so by 1/T descending.
    let first = &CRITICAL_ROWS[0];
    if x >= 1.0 / first.0 {
        return Ok(first.1[col]);
    }
    for w in CRITICAL_ROWS.windows(2) {
        let (t_lo, vals_lo) = w[0];
        let (t_hi, vals_hi) = w[1];
        let x_hi = 1.0 / t_lo; // larger 1/T
        let x_lo = if t_hi.is_infinite() { 0.0 } else { 1.0 / t_hi };
        if x <= x_hi && x >= x_lo {
            let f = if x_hi == x_lo {
                0.0
            } else {
                (x - x_lo) / (x_hi - x_lo)
            };
            return Ok(vals_hi[col] + f * (vals_lo[col] - vals_hi[col]));
        }
    }
    Ok(CRITICAL_ROWS[CRITICAL_ROWS.len() - 1].1[col])
}

/// Rule-of-thumb lag order `floor(12·(N/100)^0.25)`.
pub fn default_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Augmented Dickey-Fuller test: regresses Δy_t on a constant, y_{t−1} and
/// `lags` lagged differences, then compares the t-statistic of the y_{t−1}
/// coefficient against the built-in critical values. Rejection means the
/// series behaves as stationary.
pub fn adf_test(
    series: &[f64],
    lags: usize,
    alpha: f64,
) -> Result<StationarityReport, StationarityError> {
    alpha_column(alpha)?;
    let n = series.len();
    if n < 20 + lags {
        return Err(StationarityError::TooShort {
            needed: 20 + lags,
            got: n,
            lags,
        });
    }

    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let p = lags + 2;
    let t_eff = diffs.len() - lags;
    if t_eff <= p {
        return Err(StationarityError::TooShort {
            needed: p + lags + 2,
            got: n,
            lags,
        });
    }

    let mut x = Vec::with_capacity(t_eff * p);
    let mut y = Vec::with_capacity(t_eff);
    for t in lags..diffs.len() {
        x.push(1.0);
        x.push(series[t]);
        for i in 1..=lags {
            x.push(diffs[t - i]);
        }
        y.push(diffs[t]);
    }

    let fit = linalg::lstsq(&x, t_eff, p, &y).ok_or(StationarityError::SingularRegression)?;
    if fit.condition() > 1e12 {
        return Err(StationarityError::SingularRegression);
    }

    let scale = 1.0 + series.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let statistic = if fit.rss <= 1e-20 * scale {
        // A numerically exact fit means the series is deterministic; the
        // t-ratio is 0/0, so report no evidence against the null.
        0.0
    } else {
        let sigma2 = fit.rss / (t_eff - p) as f64;
        let se = (sigma2 * fit.unscaled_coef_variances()[1]).sqrt();
        fit.coef[1] / se
    };

    let critical = critical_value(alpha, t_eff)?;
    Ok(StationarityReport {
        statistic,
        lags,
        alpha,
        critical_value: critical,
        reject_unit_root: statistic < critical,
    })
}
