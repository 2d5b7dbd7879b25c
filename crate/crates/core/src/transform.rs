//! Box-Cox variance stabilization with automatic shift handling for series
//! that contain zeros.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("value {value} at offset {index} is not positive after shift {shift}")]
    NonPositive {
        index: usize,
        value: f64,
        shift: f64,
    },
    #[error("shift must be a finite non-negative number, got {0}")]
    BadShift(f64),
    #[error("lambda must be finite, got {0}")]
    BadLambda(f64),
    #[error("cannot profile lambda on an empty or constant series")]
    DegenerateSeries,
}

/// A fitted power transform `y ↦ ((y+shift)^λ − 1)/λ` (natural log at λ=0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxCoxTransform {
    pub lambda: f64,
    /// Non-negative offset added before transforming, so zero-inflated
    /// series become strictly positive.
    pub shift: f64,
}

impl BoxCoxTransform {
    pub fn new(lambda: f64, shift: f64) -> Result<Self, TransformError> {
        if !lambda.is_finite() {
            return Err(TransformError::BadLambda(lambda));
        }
        if !shift.is_finite() || shift < 0.0 {
            return Err(TransformError::BadShift(shift));
        }
        Ok(Self { lambda, shift })
    }

    /// Chooses the shift for a series: 0 when all values are positive,
    /// otherwise `−min + 1`.
    pub fn shift_for(values: &[f64]) -> f64 {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            0.0
        } else {
            -min + 1.0
        }
    }

    pub fn apply_one(&self, y: f64, index: usize) -> Result<f64, TransformError> {
        let shifted = y + self.shift;
        if !(shifted > 0.0) {
            return Err(TransformError::NonPositive {
                index,
                value: y,
                shift: self.shift,
            });
        }
        // expm1/ln keep the λ→0 limit numerically exact.
        Ok(if self.lambda == 0.0 {
            shifted.ln()
        } else {
            (self.lambda * shifted.ln()).exp_m1() / self.lambda
        })
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>, TransformError> {
        values
            .iter()
            .enumerate()
            .map(|(i, &y)| self.apply_one(y, i))
            .collect()
    }

    /// Maps a transformed value back to the original scale. Values outside
    /// the image of the forward transform (possible for model forecasts) are
    /// clamped to the boundary instead of producing NaN.
    pub fn invert_one(&self, z: f64) -> f64 {
        if self.lambda == 0.0 {
            z.exp() - self.shift
        } else {
            let u = (self.lambda * z + 1.0).max(1e-12);
            (u.ln() / self.lambda).exp() - self.shift
        }
    }

    pub fn invert(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&z| self.invert_one(z)).collect()
    }
}

/// Plain Box-Cox with no shift.
pub fn box_cox(values: &[f64], lambda: f64) -> Result<Vec<f64>, TransformError> {
    BoxCoxTransform::new(lambda, 0.0)?.apply(values)
}

/// Profiles λ over the grid −2.00, −1.95, …, 2.00 and keeps the value that
/// maximizes the Gaussian profile log-likelihood
/// `−(n/2)·ln σ̂²(λ) + (λ−1)·Σ ln(yᵢ+shift)`. The shift follows
/// [`BoxCoxTransform::shift_for`].
pub fn box_cox_mle(values: &[f64]) -> Result<BoxCoxTransform, TransformError> {
    if values.len() < 2 {
        return Err(TransformError::DegenerateSeries);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(TransformError::DegenerateSeries);
    }
    let shift = BoxCoxTransform::shift_for(values);
    let n = values.len() as f64;
    let log_sum: f64 = values.iter().map(|y| (y + shift).ln()).sum();

    let mut best: Option<(f64, f64)> = None;
    for step in 0..=80 {
        let lambda = -2.0 + 0.05 * f64::from(step);
        let t = BoxCoxTransform { lambda, shift };
        let z = t.apply(values)?;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        // Relative floor keeps rounding noise on a near-constant transform
        // from masquerading as a huge likelihood.
        let floor = 1e-12 * (1.0 + mean.abs());
        if var <= floor * floor {
            continue;
        }
        let ll = -0.5 * n * var.ln() + (lambda - 1.0) * log_sum;
        if best.map_or(true, |(b, _)| ll > b) {
            best = Some((ll, lambda));
        }
    }
    match best {
        Some((_, lambda)) => Ok(BoxCoxTransform { lambda, shift }),
        None => Err(TransformError::DegenerateSeries),
    }
}
