//! Distances between curves and the kernel weights built on them.

use serde::{Deserialize, Serialize};

use super::SfplrError;
use crate::linalg::sym_eigen;
use crate::series::FunctionalSample;

/// Which notion of distance between two curves to use. `PcaQ` measures
/// distance between projections onto the top `q` principal components of the
/// training curves and therefore needs a fitted basis before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SemiMetricSpec {
    EuclidGrid,
    DerivGrid,
    PcaQ { q: usize },
}

/// Kernel for Nadaraya-Watson weights on nonnegative distances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// K(u) = (3/2)(1 − u²) on [0, 1], zero elsewhere.
    #[default]
    AsymmetricQuadratic,
}

impl Kernel {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::AsymmetricQuadratic => {
                if (0.0..=1.0).contains(&u) {
                    1.5 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }
}

/// A semi-metric ready to evaluate: carries the principal-component basis
/// when the spec calls for one. Distances may be zero for distinct curves
/// (derivative and projection metrics ignore parts of the curve), hence
/// "semi".
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMetric {
    spec: SemiMetricSpec,
    /// `q` orthonormal basis curves, each of length tau, when fitted.
    basis: Option<Vec<Vec<f64>>>,
}

impl SemiMetric {
    /// A metric with no fitted basis; `PcaQ` distances will fail until
    /// [`SemiMetric::fitted`] is used instead.
    pub fn new(spec: SemiMetricSpec) -> Self {
        SemiMetric { spec, basis: None }
    }

    /// Fits whatever state the spec needs from the training curves: the
    /// top-q eigenvectors of the sample covariance for `PcaQ`, nothing for
    /// the grid metrics.
    pub fn fitted(spec: SemiMetricSpec, sample: &FunctionalSample) -> Result<Self, SfplrError> {
        let SemiMetricSpec::PcaQ { q } = spec else {
            return Ok(SemiMetric { spec, basis: None });
        };
        let tau = sample.tau();
        if q == 0 || q > tau {
            return Err(SfplrError::BadComponentCount { q, tau });
        }
        let n = sample.n();
        let mut mean = vec![0.0; tau];
        for curve in sample.curves() {
            for (m, v) in mean.iter_mut().zip(curve) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut cov = vec![0.0; tau * tau];
        for curve in sample.curves() {
            for s in 0..tau {
                let ds = curve[s] - mean[s];
                for t in s..tau {
                    cov[s * tau + t] += ds * (curve[t] - mean[t]);
                }
            }
        }
        for s in 0..tau {
            for t in s..tau {
                let v = cov[s * tau + t] / n as f64;
                cov[s * tau + t] = v;
                cov[t * tau + s] = v;
            }
        }
        let basis = sym_eigen(&cov, tau)
            .into_iter()
            .take(q)
            .map(|(_, vector)| vector)
            .collect();
        Ok(SemiMetric {
            spec,
            basis: Some(basis),
        })
    }

    pub fn spec(&self) -> SemiMetricSpec {
        self.spec
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64, SfplrError> {
        if a.len() != b.len() {
            return Err(SfplrError::CurveLengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        match self.spec {
            SemiMetricSpec::EuclidGrid => {
                Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            }
            SemiMetricSpec::DerivGrid => {
                let sq: f64 = a
                    .windows(2)
                    .zip(b.windows(2))
                    .map(|(wa, wb)| ((wa[1] - wa[0]) - (wb[1] - wb[0])).powi(2))
                    .sum();
                Ok(sq.sqrt())
            }
            SemiMetricSpec::PcaQ { .. } => {
                let basis = self.basis.as_ref().ok_or(SfplrError::UnfittedBasis)?;
                if let Some(first) = basis.first() {
                    if first.len() != a.len() {
                        return Err(SfplrError::CurveLengthMismatch {
                            a: a.len(),
                            b: first.len(),
                        });
                    }
                }
                let sq: f64 = basis
                    .iter()
                    .map(|e| {
                        let score: f64 =
                            e.iter().zip(a).zip(b).map(|((ev, x), y)| ev * (x - y)).sum();
                        score * score
                    })
                    .sum();
                Ok(sq.sqrt())
            }
        }
    }
}

/// Nadaraya-Watson weights of `target` against every curve in `sample`:
/// w_i = K(d_i/h) / Σ_j K(d_j/h).
pub fn nw_weights(
    target: &[f64],
    sample: &FunctionalSample,
    h: f64,
    kernel: Kernel,
    metric: &SemiMetric,
) -> Result<Vec<f64>, SfplrError> {
    if !(h > 0.0) {
        return Err(SfplrError::NonPositiveBandwidth { h });
    }
    let mut raw = Vec::with_capacity(sample.n());
    for curve in sample.curves() {
        raw.push(kernel.eval(metric.distance(target, curve)? / h));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(SfplrError::ZeroKernelMass { h });
    }
    for w in &mut raw {
        *w /= total;
    }
    Ok(raw)
}

/// All pairwise distances d(Y_i, Y_j), i < j.
pub fn pairwise_distances(
    sample: &FunctionalSample,
    metric: &SemiMetric,
) -> Result<Vec<f64>, SfplrError> {
    let n = sample.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(metric.distance(sample.curve(i), sample.curve(j))?);
        }
    }
    Ok(out)
}

/// Default bandwidth candidates: 20 log-spaced values spanning the 5th to
/// 95th percentile of pairwise curve distances.
pub fn default_bandwidth_grid(
    sample: &FunctionalSample,
    metric: &SemiMetric,
) -> Result<Vec<f64>, SfplrError> {
    let mut d = pairwise_distances(sample, metric)?;
    d.sort_by(f64::total_cmp);
    let hi = percentile(&d, 0.95);
    if hi <= 0.0 {
        return Err(SfplrError::NoDistanceScale);
    }
    // Duplicate curves can drag the low percentile to zero; clamp so the
    // log spacing stays finite.
    let lo = percentile(&d, 0.05).max(hi * 1e-3);
    let count = 20;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|k| (ln_lo + (ln_hi - ln_lo) * k as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Linear-interpolation percentile of an ascending-sorted slice.
fn percentile(sorted: &[f64], frac: f64) -> f64 {
    let pos = frac * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}
