//! Semi-functional partial linear regression: a scalar response modeled as a
//! linear term in numeric covariates plus a nonparametric function of a
//! predictor curve, estimated with Nadaraya-Watson kernel weights.

mod dataset;
mod metric;
mod model;

pub use dataset::{build_dataset, prediction_row, CovariateMode, SfplrDataset, TargetSpec};
pub use metric::{
    default_bandwidth_grid, nw_weights, pairwise_distances, Kernel, SemiMetric, SemiMetricSpec,
};
pub use model::{
    cv_bandwidth, fit_beta, fit_beta_with_weights, Prediction, SfplrModel, SmoothEstimate,
};

use crate::calendar::CalendarMonth;
use crate::series::SeriesError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SfplrError {
    #[error(transparent)]
    Covariates(#[from] CovariateMatrixError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("curves have different lengths ({a} vs {b})")]
    CurveLengthMismatch { a: usize, b: usize },
    #[error("projection metric used before fitting a component basis")]
    UnfittedBasis,
    #[error("{q} principal components requested from curves of length {tau}")]
    BadComponentCount { q: usize, tau: usize },
    #[error("bandwidth must be positive (got {h})")]
    NonPositiveBandwidth { h: f64 },
    #[error("every kernel weight is zero at bandwidth {h}; enlarge the bandwidth")]
    ZeroKernelMass { h: f64 },
    #[error("design matrix is singular or nearly so (condition {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("need more observations than covariates ({n} rows, {p} covariates)")]
    TooFewObservations { n: usize, p: usize },
    #[error("{curves} curves paired with {rows} covariate rows and {responses} responses")]
    ShapeMismatch {
        curves: usize,
        rows: usize,
        responses: usize,
    },
    #[error("model has {expected} coefficients but the prediction row has {got}")]
    CovariateCount { expected: usize, got: usize },
    #[error("covariate {name:?} does not cover {month}")]
    CovariateGap { name: String, month: CalendarMonth },
    #[error("target month index {month_index} outside curves of length {tau}")]
    BadTargetMonth { month_index: usize, tau: usize },
    #[error("need at least 3 curves to build a training set (got {n})")]
    TooFewCurves { n: usize },
    #[error("bandwidth grid is empty")]
    EmptyBandwidthGrid,
    #[error("every candidate bandwidth is degenerate for some held-out curve")]
    AllBandwidthsDegenerate,
    #[error("pairwise curve distances are all zero; no bandwidth scale exists")]
    NoDistanceScale,
}

#[derive(Debug, Error)]
pub enum CovariateMatrixError {
    #[error("{names} covariate names supplied for {columns} columns")]
    NameCount { names: usize, columns: usize },
    #[error("covariate columns have unequal lengths ({first} vs {other})")]
    Ragged { first: usize, other: usize },
    #[error("covariate {name:?} has a non-finite value at row {row}")]
    NonFinite { name: String, row: usize },
}

/// Numeric covariates observed alongside a series or curve sample.
/// Stored column-major: `column(j)[i]` is covariate `j` at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix {
    n_rows: usize,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl CovariateMatrix {
    pub fn new(
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self, CovariateMatrixError> {
        if names.len() != columns.len() {
            return Err(CovariateMatrixError::NameCount {
                names: names.len(),
                columns: columns.len(),
            });
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(CovariateMatrixError::Ragged {
                    first: n_rows,
                    other: col.len(),
                });
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(CovariateMatrixError::NonFinite {
                    name: name.clone(),
                    row,
                });
            }
        }
        Ok(Self {
            n_rows,
            names,
            columns,
        })
    }

    /// A matrix with no covariates but a definite row count, for models that
    /// accept an optional regression part.
    pub fn empty(n_rows: usize) -> Self {
        Self {
            n_rows,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}
