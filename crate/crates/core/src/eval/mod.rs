//! Evaluation protocol: a fixed train/test split, NSE and RMSE skill
//! scores, a three-method comparison report, and a synthetic data generator
//! for desk-scale verification.

mod compare;
mod report;
mod synth;

pub use compare::{
    choose_order, run_comparison, ArimaConfig, ArimaxConfig, ComparisonConfig, SfplrConfig,
};
pub use report::{EvaluationReport, Method, MethodOutcome, ReportRow};
pub use synth::{
    generate_synthetic, CovariateProcess, GroundTruth, MShape, SyntheticDataset, SyntheticSpec,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arima::ArimaError;
use crate::calendar::CalendarMonth;
use crate::series::{SeriesError, TimeSeries};
use crate::sfplr::{CovariateMatrixError, SfplrError};
use crate::transform::TransformError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction and observation lengths differ: {pred} vs {obs}")]
    LengthMismatch { pred: usize, obs: usize },
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("observations are constant, so the NSE denominator is zero")]
    ConstantObservations,
    #[error("forecast horizon must be at least 1")]
    ZeroHorizon,
    #[error("horizon {horizon} exceeds the curve length {tau}")]
    HorizonBeyondCurve { horizon: usize, tau: usize },
    #[error("training window must span at least {needed} months, got {got}")]
    ShortTrainingWindow { needed: usize, got: usize },
    #[error("region {region}: series ends at {end} but the test window runs through {needed}")]
    UncoveredTestWindow {
        region: String,
        needed: CalendarMonth,
        end: CalendarMonth,
    },
    #[error("dataset has no regions")]
    EmptyDataset,
    #[error("forecast produced a non-finite score")]
    NonFiniteForecast,
    #[error("invalid synthetic spec: {reason}")]
    BadSyntheticSpec { reason: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arima(#[from] ArimaError),
    #[error(transparent)]
    Sfplr(#[from] SfplrError),
    #[error(transparent)]
    Covariates(#[from] CovariateMatrixError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Nash-Sutcliffe efficiency: 1 − Σ(ŷ−y)² / Σ(ȳ−y)² with ȳ the mean of the
/// observed values. 1 is a perfect prediction, 0 performs as well as the
/// mean, and the score is unbounded below.
pub fn nse(pred: &[f64], obs: &[f64]) -> Result<f64, EvalError> {
    if pred.len() != obs.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            obs: obs.len(),
        });
    }
    if obs.len() < 2 {
        return Err(EvalError::TooFewPoints {
            needed: 2,
            got: obs.len(),
        });
    }
    let mean = obs.iter().sum::<f64>() / obs.len() as f64;
    nse_against(pred, obs, mean)
}

/// NSE with an explicit reference level replacing the observed mean, for
/// sensitivity runs that normalize by the training mean instead.
pub fn nse_against(pred: &[f64], obs: &[f64], reference: f64) -> Result<f64, EvalError> {
    if pred.len() != obs.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            obs: obs.len(),
        });
    }
    let denom: f64 = obs.iter().map(|y| (reference - y).powi(2)).sum();
    if denom == 0.0 {
        return Err(EvalError::ConstantObservations);
    }
    let numer: f64 = pred
        .iter()
        .zip(obs)
        .map(|(p, y)| (p - y).powi(2))
        .sum();
    Ok(1.0 - numer / denom)
}

/// Root mean square error over an equal-length prediction/observation pair.
pub fn rmse(pred: &[f64], obs: &[f64]) -> Result<f64, EvalError> {
    if pred.len() != obs.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            obs: obs.len(),
        });
    }
    if obs.is_empty() {
        return Err(EvalError::TooFewPoints { needed: 1, got: 0 });
    }
    let mse: f64 = pred
        .iter()
        .zip(obs)
        .map(|(p, y)| (p - y).powi(2))
        .sum::<f64>()
        / obs.len() as f64;
    Ok(mse.sqrt())
}

/// Which mean anchors the NSE denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NseReference {
    /// Mean of the observed test values (the displayed formula).
    #[default]
    TestMean,
    /// Mean of the training window, for sensitivity studies.
    TrainingMean,
}

/// Fixed train/test split: everything through `train_end` trains, the next
/// `horizon` months are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: CalendarMonth,
    pub horizon: usize,
}

impl SplitSpec {
    /// First and last scored month.
    pub fn test_window(&self) -> (CalendarMonth, CalendarMonth) {
        (
            self.train_end.plus_months(1),
            self.train_end.plus_months(self.horizon as i64),
        )
    }

    /// Protocol invariants: a training window of at least three curves and a
    /// horizon no longer than one curve.
    pub fn validate(&self, series_start: CalendarMonth, tau: usize) -> Result<(), EvalError> {
        if self.horizon == 0 {
            return Err(EvalError::ZeroHorizon);
        }
        if self.horizon > tau {
            return Err(EvalError::HorizonBeyondCurve {
                horizon: self.horizon,
                tau,
            });
        }
        let train_len = self.train_end.months_since(series_start) + 1;
        if train_len < 3 * tau as i64 {
            return Err(EvalError::ShortTrainingWindow {
                needed: 3 * tau,
                got: train_len.max(0) as usize,
            });
        }
        Ok(())
    }
}

/// Input to the comparison: one incidence series per region plus a shared
/// pool of named covariate series, all on the same monthly calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset {
    pub regions: Vec<(String, TimeSeries)>,
    pub covariates: Vec<(String, TimeSeries)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_scores_one_and_zero() {
        let obs = [3.0, 7.0, 2.0, 9.0];
        assert_eq!(nse(&obs, &obs).unwrap(), 1.0);
        assert_eq!(rmse(&obs, &obs).unwrap(), 0.0);
    }

    #[test]
    fn predicting_the_mean_scores_zero() {
        let obs = [1.0, 2.0, 6.0];
        let mean = obs.iter().sum::<f64>() / 3.0;
        let pred = [mean; 3];
        assert_eq!(nse(&pred, &obs).unwrap(), 0.0);
    }

    #[test]
    fn anti_correlated_toy_case_by_hand() {
        // numerator (2-0)² + (0-2)² = 8, denominator (1-0)² + (1-2)² = 2
        let got = nse(&[2.0, 0.0], &[0.0, 2.0]).unwrap();
        assert_eq!(got, -3.0);
    }

    #[test]
    fn constant_observations_are_rejected() {
        assert!(matches!(
            nse(&[1.0, 2.0], &[4.0, 4.0]),
            Err(EvalError::ConstantObservations)
        ));
        // but an external reference level keeps the score defined
        assert!(nse_against(&[1.0, 2.0], &[4.0, 4.0], 0.0).is_ok());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(matches!(
            nse(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { pred: 1, obs: 2 })
        ));
        assert!(matches!(
            rmse(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { pred: 1, obs: 2 })
        ));
        assert!(matches!(rmse(&[], &[]), Err(EvalError::TooFewPoints { .. })));
        assert!(matches!(
            nse(&[1.0], &[1.0]),
            Err(EvalError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn rmse_matches_hand_arithmetic() {
        let got = rmse(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!((got - (12.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_of_a_constant_offset_is_its_magnitude() {
        let obs = [2.0, 5.0, 11.0, 3.0];
        let pred: Vec<f64> = obs.iter().map(|y| y - 4.2).collect();
        assert!((rmse(&pred, &obs).unwrap() - 4.2).abs() < 1e-12);
    }

    #[test]
    fn nse_is_invariant_under_common_affine_rescaling() {
        let obs = [3.0, 7.0, 2.0, 9.0, 4.0];
        let pred = [2.5, 8.0, 1.0, 7.5, 5.0];
        let base = nse(&pred, &obs).unwrap();
        for (a, b) in [(2.0, 0.0), (-0.7, 3.0), (1e3, -41.0)] {
            let p2: Vec<f64> = pred.iter().map(|v| a * v + b).collect();
            let o2: Vec<f64> = obs.iter().map(|v| a * v + b).collect();
            assert!((nse(&p2, &o2).unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn rmse_shifts_and_scales_as_a_length() {
        let obs = [3.0, 7.0, 2.0, 9.0];
        let pred = [2.0, 8.5, 2.0, 7.0];
        let base = rmse(&pred, &obs).unwrap();
        let shift: Vec<f64> = pred.iter().map(|v| v + 11.0).collect();
        let obs_shift: Vec<f64> = obs.iter().map(|v| v + 11.0).collect();
        assert!((rmse(&shift, &obs_shift).unwrap() - base).abs() < 1e-12);
        let scale: Vec<f64> = pred.iter().map(|v| 3.0 * v).collect();
        let obs_scale: Vec<f64> = obs.iter().map(|v| 3.0 * v).collect();
        assert!((rmse(&scale, &obs_scale).unwrap() - 3.0 * base).abs() < 1e-12);
    }

    #[test]
    fn nse_never_exceeds_one() {
        // any deviation from the observations only subtracts from the score
        let obs = [1.0, 4.0, 2.0];
        for pred in [[1.0, 4.0, 2.0], [0.0, 0.0, 0.0], [100.0, -3.0, 2.0]] {
            assert!(nse(&pred, &obs).unwrap() <= 1.0);
        }
    }

    #[test]
    fn split_validation_enforces_the_protocol_bounds() {
        let start = CalendarMonth::new(2009, 1).unwrap();
        let split = SplitSpec {
            train_end: CalendarMonth::new(2017, 12).unwrap(),
            horizon: 12,
        };
        split.validate(start, 12).unwrap();
        assert_eq!(
            split.test_window(),
            (
                CalendarMonth::new(2018, 1).unwrap(),
                CalendarMonth::new(2018, 12).unwrap()
            )
        );

        let short = SplitSpec {
            train_end: CalendarMonth::new(2010, 12).unwrap(),
            horizon: 12,
        };
        assert!(matches!(
            short.validate(start, 12),
            Err(EvalError::ShortTrainingWindow { needed: 36, got: 24 })
        ));
        assert!(matches!(
            SplitSpec {
                train_end: split.train_end,
                horizon: 13
            }
            .validate(start, 12),
            Err(EvalError::HorizonBeyondCurve { .. })
        ));
        assert!(matches!(
            SplitSpec {
                train_end: split.train_end,
                horizon: 0
            }
            .validate(start, 12),
            Err(EvalError::ZeroHorizon)
        ));
    }
}
