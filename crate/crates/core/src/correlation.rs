//! Sample autocorrelation and partial autocorrelation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("need more than {max_lag} observations for {max_lag} lags, got {len}")]
    TooShort { len: usize, max_lag: usize },
    #[error("max_lag must be at least 1")]
    ZeroLag,
    #[error("series is constant: autocorrelation is undefined")]
    ConstantSeries,
    #[error("Durbin-Levinson recursion became degenerate at lag {lag}")]
    Degenerate { lag: usize },
}

/// Sample autocorrelation for lags `0..=max_lag` using the biased (1/N)
/// covariance estimator, which keeps the autocovariance sequence positive
/// semidefinite. Entry `k` is the lag-k autocorrelation; entry 0 is 1.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>, CorrelationError> {
    if max_lag == 0 {
        return Err(CorrelationError::ZeroLag);
    }
    let n = series.len();
    if n <= max_lag {
        return Err(CorrelationError::TooShort { len: n, max_lag });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let gamma0 = series.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n as f64;
    if gamma0 <= 0.0 {
        return Err(CorrelationError::ConstantSeries);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for k in 1..=max_lag {
        let gamma_k = series[k..]
            .iter()
            .zip(series)
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / n as f64;
        out.push(gamma_k / gamma0);
    }
    Ok(out)
}

/// Sample partial autocorrelation for lags `0..=max_lag` via the
/// Durbin-Levinson recursion on [`acf`]. Entry `k` is the lag-k partial
/// autocorrelation; entry 0 is 1 by convention and entry 1 equals `acf[1]`.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>, CorrelationError> {
    let rho = acf(series, max_lag)?;
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    out.push(rho[1]);

    // phi holds the order-(k-1) AR coefficients phi_{k-1,1..k-1}.
    let mut phi = vec![rho[1]];
    for k in 2..=max_lag {
        let mut num = rho[k];
        let mut den = 1.0;
        for (j, &p) in phi.iter().enumerate() {
            num -= p * rho[k - 1 - j];
            den -= p * rho[j + 1];
        }
        if den.abs() < 1e-12 {
            return Err(CorrelationError::Degenerate { lag: k });
        }
        let phi_kk = num / den;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - phi_kk * prev[k - 2 - j];
        }
        phi.push(phi_kk);
        out.push(phi_kk);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = Vec::with_capacity(n);
        let mut prev = 0.0;
        for _ in 0..n {
            let e: f64 = StandardNormal.sample(&mut rng);
            prev = phi * prev + e;
            y.push(prev);
        }
        y
    }

    // Oracle by hand for [1,2,3,4]: deviations (−1.5,−0.5,0.5,1.5),
    // γ0 = 1.25, γ1 = 0.3125, γ2 = −0.375, γ3 = −0.5625.
    #[test]
    fn acf_small_series_hand_oracle() {
        let r = acf(&[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2], -0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(r[3], -0.45, epsilon = 1e-12);
    }

    #[test]
    fn pacf_lag_one_equals_acf_lag_one() {
        let y = ar1(0.4, 300, 5);
        let a = acf(&y, 5).unwrap();
        let p = pacf(&y, 5).unwrap();
        assert_eq!(a[1], p[1]);
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn ar1_acf_and_pacf_match_theory() {
        let y = ar1(0.6, 5000, 1);
        let a = acf(&y, 3).unwrap();
        let p = pacf(&y, 3).unwrap();
        assert!(
            (0.55..=0.65).contains(&a[1]),
            "acf[1] = {} outside AR(1) band",
            a[1]
        );
        assert!(
            p[2].abs() <= 0.05,
            "pacf[2] = {} should be near zero for AR(1)",
            p[2]
        );
    }

    #[test]
    fn white_noise_acf_stays_in_confidence_band() {
        let n = 5000;
        let bound = 3.0 / (n as f64).sqrt();
        let mut ok = 0;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = acf(&y, 10).unwrap();
            if a[1..].iter().all(|r| r.abs() < bound) {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/100 white-noise draws stayed in band");
    }

    #[test]
    fn acf_is_affine_invariant() {
        let y = ar1(0.5, 400, 2);
        let scaled: Vec<f64> = y.iter().map(|v| -3.7 * v + 11.0).collect();
        let a = acf(&y, 8).unwrap();
        let b = acf(&scaled, 8).unwrap();
        for (x, z) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, z, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_series_is_rejected() {
        assert!(matches!(
            acf(&[2.0; 50], 3),
            Err(CorrelationError::ConstantSeries)
        ));
        assert!(pacf(&[2.0; 50], 3).is_err());
        assert!(matches!(
            acf(&[1.0, 2.0], 2),
            Err(CorrelationError::TooShort { .. })
        ));
    }

    // Independent check of the recursion: solve the same Yule-Walker normal
    // equations R·b = r directly by Gaussian elimination and compare the
    // last coefficient. (A literal OLS regression on the data differs from
    // Yule-Walker by O(1/N) edge effects, so it gets a looser band below.)
    fn yule_walker_direct(rho: &[f64], k: usize) -> f64 {
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = rho[(i as isize - j as isize).unsigned_abs()];
            }
            a[i][k] = rho[i + 1];
        }
        for col in 0..k {
            let piv = (col..k).max_by(|&r1, &r2| {
                a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()
            });
            let piv = piv.unwrap();
            a.swap(col, piv);
            for row in 0..k {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for c in col..=k {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
        a[k - 1][k] / a[k - 1][k - 1]
    }

    #[test]
    fn durbin_levinson_matches_direct_yule_walker_solve() {
        let y = ar1(0.6, 500, 8);
        let rho = acf(&y, 6).unwrap();
        let p = pacf(&y, 6).unwrap();
        for k in 1..=6 {
            let direct = yule_walker_direct(&rho, k);
            assert!(
                (p[k] - direct).abs() <= 1e-6,
                "lag {k}: recursion {} vs direct solve {direct}",
                p[k]
            );
        }
    }

    #[test]
    fn pacf_statistically_agrees_with_ols_regression() {
        let y = ar1(0.6, 500, 12);
        let p = pacf(&y, 3).unwrap();
        for k in 1..=3 {
            // OLS of y_t on [1, y_{t-1}, ..., y_{t-k}], solved via its normal
            // equations by the same small eliminator used above.
            let n = y.len();
            let dim = k + 1;
            let mut xtx = vec![vec![0.0; dim + 1]; dim];
            for t in k..n {
                let mut row = vec![1.0];
                for j in 1..=k {
                    row.push(y[t - j]);
                }
                for i in 0..dim {
                    for j in 0..dim {
                        xtx[i][j] += row[i] * row[j];
                    }
                    xtx[i][dim] += row[i] * y[t];
                }
            }
            for col in 0..dim {
                let piv = (col..dim)
                    .max_by(|&r1, &r2| {
                        xtx[r1][col].abs().partial_cmp(&xtx[r2][col].abs()).unwrap()
                    })
                    .unwrap();
                xtx.swap(col, piv);
                for row in 0..dim {
                    if row != col {
                        let f = xtx[row][col] / xtx[col][col];
                        for c in col..=dim {
                            xtx[row][c] -= f * xtx[col][c];
                        }
                    }
                }
            }
            let ols_last = xtx[dim - 1][dim] / xtx[dim - 1][dim - 1];
            assert!(
                (p[k] - ols_last).abs() <= 0.05,
                "lag {k}: pacf {} vs OLS regression {ols_last}",
                p[k]
            );
        }
    }
}
