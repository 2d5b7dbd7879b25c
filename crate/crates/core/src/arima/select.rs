//! Automatic order selection: unit-root testing picks d, an AICc grid
//! search picks (p, q).

use rayon::prelude::*;

use super::{css, ArimaError, ArimaSpec};
use crate::series::difference;
use crate::stationarity::{adf_test, default_lags};

#[derive(Debug, Clone, Copy)]
pub struct SelectOptions {
    pub p_max: usize,
    pub q_max: usize,
    pub d_max: usize,
    /// Significance level of the unit-root test deciding d.
    pub alpha: f64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            p_max: 5,
            q_max: 5,
            d_max: 2,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderSelection {
    pub spec: ArimaSpec,
    /// True when no differencing order up to d_max passed the unit-root
    /// test and d_max was used anyway.
    pub d_forced: bool,
    /// AICc of the winning (p, q) fit.
    pub aicc: f64,
}

/// Chooses the smallest d whose d-times-differenced series rejects a unit
/// root, then the (p, q) on that differenced series minimizing AICc.
/// Candidate fits that fail are skipped; AICc ties break toward smaller
/// p + q, then smaller p, so the result is independent of evaluation order.
pub fn select_order(values: &[f64], options: &SelectOptions) -> Result<OrderSelection, ArimaError> {
    if values.len() < 30 {
        return Err(ArimaError::InsufficientData {
            needed: 30,
            got: values.len(),
        });
    }

    let mut chosen = None;
    for d in 0..=options.d_max {
        let diffed = difference(values, d)?;
        let report = adf_test(&diffed, default_lags(diffed.len()), options.alpha)?;
        if report.reject_unit_root {
            chosen = Some(d);
            break;
        }
    }
    let (d, d_forced) = match chosen {
        Some(d) => (d, false),
        None => (options.d_max, true),
    };

    let w = difference(values, d)?;
    let include_mean = d == 0;
    let grid: Vec<(usize, usize)> = (0..=options.p_max)
        .flat_map(|p| (0..=options.q_max).map(move |q| (p, q)))
        .collect();
    let scores: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&(p, q)| {
            css::fit_arma_with(&w, p, q, include_mean)
                .ok()
                .map(|fit| fit.aicc)
                .filter(|aicc| aicc.is_finite())
        })
        .collect();

    let mut best: Option<(usize, usize, f64)> = None;
    for (&(p, q), score) in grid.iter().zip(&scores) {
        let Some(aicc) = *score else { continue };
        let better = match best {
            None => true,
            Some((bp, bq, b_aicc)) => {
                aicc < b_aicc || (aicc == b_aicc && (p + q, p) < (bp + bq, bp))
            }
        };
        if better {
            best = Some((p, q, aicc));
        }
    }
    let Some((p, q, aicc)) = best else {
        return Err(ArimaError::AllFitsFailed);
    };
    Ok(OrderSelection {
        spec: ArimaSpec::new(p, d, q),
        d_forced,
        aicc,
    })
}
