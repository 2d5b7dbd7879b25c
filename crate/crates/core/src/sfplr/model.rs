//! The partially linear estimator: kernel-smoothed regression for the linear
//! part, Nadaraya-Watson smoothing of partial residuals for the functional
//! part, and leave-one-out bandwidth selection.

use rayon::prelude::*;

use super::dataset::TargetSpec;
use super::metric::{nw_weights, Kernel, SemiMetric};
use super::{CovariateMatrix, SfplrError};
use crate::linalg::lstsq;
use crate::series::FunctionalSample;

const CONDITION_LIMIT: f64 = 1e10;

/// A fitted semi-functional partial linear model.
#[derive(Debug, Clone)]
pub struct SfplrModel {
    pub beta: Vec<f64>,
    pub h: f64,
    pub kernel: Kernel,
    pub metric: SemiMetric,
    pub train_curves: FunctionalSample,
    pub train_x: CovariateMatrix,
    pub train_z: Vec<f64>,
    pub target: TargetSpec,
}

/// Smoothed functional-part estimate at a query curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothEstimate {
    pub value: f64,
    /// True when the query had no kernel mass and the single nearest
    /// training curve was used instead.
    pub nearest_fallback: bool,
}

/// A one-step prediction: `value` is clamped at zero (incidence cannot be
/// negative), `raw` keeps the unclamped number for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub raw: f64,
    pub nearest_fallback: bool,
}

/// Estimates the linear coefficients by least squares after partialling the
/// kernel smoother out of both sides: solves (I−W)X β ≈ (I−W)Z, where row i
/// of W holds the weights of curve i against every training curve (itself
/// included).
pub fn fit_beta(
    x: &CovariateMatrix,
    z: &[f64],
    curves: &FunctionalSample,
    h: f64,
    kernel: Kernel,
    metric: &SemiMetric,
) -> Result<Vec<f64>, SfplrError> {
    check_shapes(x, z, curves)?;
    let weights = smoother_rows(curves, h, kernel, metric)?;
    fit_beta_with_weights(x, z, &weights)
}

/// The same estimator with an explicit smoother matrix, exposed so known
/// weight patterns (zero, uniform) can be checked against plain least
/// squares.
pub fn fit_beta_with_weights(
    x: &CovariateMatrix,
    z: &[f64],
    weights: &[Vec<f64>],
) -> Result<Vec<f64>, SfplrError> {
    let n = z.len();
    let p = x.n_cols();
    if n <= p {
        return Err(SfplrError::TooFewObservations { n, p });
    }
    let mut design = vec![0.0; n * p];
    let mut response = vec![0.0; n];
    for (i, row) in weights.iter().enumerate() {
        for j in 0..p {
            let col = x.column(j);
            let smoothed: f64 = row.iter().zip(col).map(|(w, v)| w * v).sum();
            design[i * p + j] = col[i] - smoothed;
        }
        let smoothed: f64 = row.iter().zip(z).map(|(w, v)| w * v).sum();
        response[i] = z[i] - smoothed;
    }
    if p == 0 {
        return Ok(Vec::new());
    }
    let solved = lstsq(&design, n, p, &response).ok_or(SfplrError::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let condition = solved.condition();
    if condition > CONDITION_LIMIT {
        return Err(SfplrError::IllConditioned { condition });
    }
    Ok(solved.coef)
}

impl SfplrModel {
    /// Fits β on the training triples and packages everything prediction
    /// needs.
    pub fn fit(
        dataset_curves: &FunctionalSample,
        x: &CovariateMatrix,
        z: &[f64],
        h: f64,
        kernel: Kernel,
        metric: SemiMetric,
        target: TargetSpec,
    ) -> Result<Self, SfplrError> {
        let beta = fit_beta(x, z, dataset_curves, h, kernel, &metric)?;
        Ok(SfplrModel {
            beta,
            h,
            kernel,
            metric,
            train_curves: dataset_curves.clone(),
            train_x: x.clone(),
            train_z: z.to_vec(),
            target,
        })
    }

    /// Z_i − X_i'β̂ for every training observation.
    fn partial_residuals(&self) -> Vec<f64> {
        partial_residuals(&self.train_x, &self.train_z, &self.beta)
    }

    /// Smooths the partial residuals at a query curve. A query with no
    /// kernel mass falls back to the nearest training curve, flagged.
    pub fn estimate_m(&self, curve: &[f64]) -> Result<SmoothEstimate, SfplrError> {
        let partial = self.partial_residuals();
        match nw_weights(curve, &self.train_curves, self.h, self.kernel, &self.metric) {
            Ok(weights) => Ok(SmoothEstimate {
                value: weights.iter().zip(&partial).map(|(w, r)| w * r).sum(),
                nearest_fallback: false,
            }),
            Err(SfplrError::ZeroKernelMass { .. }) => {
                let mut nearest = 0;
                let mut best = f64::INFINITY;
                for (i, train) in self.train_curves.curves().iter().enumerate() {
                    let d = self.metric.distance(curve, train)?;
                    if d < best {
                        best = d;
                        nearest = i;
                    }
                }
                Ok(SmoothEstimate {
                    value: partial[nearest],
                    nearest_fallback: true,
                })
            }
            Err(other) => Err(other),
        }
    }

    /// x_new'β̂ + m̂(last_curve), clamped at zero in `value`.
    pub fn predict(&self, x_new: &[f64], last_curve: &[f64]) -> Result<Prediction, SfplrError> {
        if x_new.len() != self.beta.len() {
            return Err(SfplrError::CovariateCount {
                expected: self.beta.len(),
                got: x_new.len(),
            });
        }
        let m = self.estimate_m(last_curve)?;
        let raw = dot(x_new, &self.beta) + m.value;
        Ok(Prediction {
            value: raw.max(0.0),
            raw,
            nearest_fallback: m.nearest_fallback,
        })
    }
}

/// Leave-one-out bandwidth selection: for each candidate h, refit β without
/// each observation, predict it, and accumulate squared error; the smallest
/// h among the minimizers wins. A candidate is dropped entirely if any
/// held-out curve leaves it with zero kernel mass or an unsolvable system.
pub fn cv_bandwidth(
    x: &CovariateMatrix,
    z: &[f64],
    curves: &FunctionalSample,
    kernel: Kernel,
    metric: &SemiMetric,
    h_grid: &[f64],
) -> Result<f64, SfplrError> {
    if h_grid.is_empty() {
        return Err(SfplrError::EmptyBandwidthGrid);
    }
    check_shapes(x, z, curves)?;
    let n = curves.n();
    let p = x.n_cols();
    if n <= p + 1 {
        return Err(SfplrError::TooFewObservations { n: n - 1, p });
    }
    for &h in h_grid {
        if !(h > 0.0) {
            return Err(SfplrError::NonPositiveBandwidth { h });
        }
    }

    // One distance matrix serves every candidate and every left-out point.
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric.distance(curves.curve(i), curves.curve(j))?;
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    let mut grid: Vec<f64> = h_grid.to_vec();
    grid.sort_by(f64::total_cmp);

    let scores: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&h| loo_score(x, z, &dist, n, h, kernel))
        .collect();

    let mut best: Option<(f64, f64)> = None;
    for (&h, score) in grid.iter().zip(&scores) {
        if let Some(s) = score {
            if best.is_none_or(|(_, bs)| *s < bs) {
                best = Some((h, *s));
            }
        }
    }
    match best {
        Some((h, _)) => Ok(h),
        None => Err(SfplrError::AllBandwidthsDegenerate),
    }
}

/// Total leave-one-out squared error at one bandwidth, or None when some
/// held-out point makes the candidate unusable.
fn loo_score(
    x: &CovariateMatrix,
    z: &[f64],
    dist: &[f64],
    n: usize,
    h: f64,
    kernel: Kernel,
) -> Option<f64> {
    let mut total = 0.0;
    for held in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != held).collect();
        let m = keep.len();

        // Weights of the held-out curve against the kept ones.
        let mut query = Vec::with_capacity(m);
        for &j in &keep {
            query.push(kernel.eval(dist[held * n + j] / h));
        }
        let mass: f64 = query.iter().sum();
        if mass <= 0.0 {
            return None;
        }
        for w in &mut query {
            *w /= mass;
        }

        // Smoother rows among the kept curves (self-weight included).
        let mut rows = Vec::with_capacity(m);
        for &a in &keep {
            let mut row = Vec::with_capacity(m);
            for &b in &keep {
                row.push(kernel.eval(dist[a * n + b] / h));
            }
            let mass: f64 = row.iter().sum();
            for w in &mut row {
                *w /= mass;
            }
            rows.push(row);
        }

        let x_sub = subset_matrix(x, &keep);
        let z_sub: Vec<f64> = keep.iter().map(|&i| z[i]).collect();
        let beta = match fit_beta_with_weights(&x_sub, &z_sub, &rows) {
            Ok(beta) => beta,
            Err(_) => return None,
        };
        let partial = partial_residuals(&x_sub, &z_sub, &beta);
        let m_hat: f64 = query.iter().zip(&partial).map(|(w, r)| w * r).sum();
        let pred = dot(&x.row(held), &beta) + m_hat;
        total += (pred - z[held]).powi(2);
    }
    Some(total)
}

/// Row-normalized kernel weights of every training curve against the whole
/// training set.
fn smoother_rows(
    curves: &FunctionalSample,
    h: f64,
    kernel: Kernel,
    metric: &SemiMetric,
) -> Result<Vec<Vec<f64>>, SfplrError> {
    curves
        .curves()
        .iter()
        .map(|c| nw_weights(c, curves, h, kernel, metric))
        .collect()
}

fn partial_residuals(x: &CovariateMatrix, z: &[f64], beta: &[f64]) -> Vec<f64> {
    (0..z.len()).map(|i| z[i] - dot(&x.row(i), beta)).collect()
}

fn subset_matrix(x: &CovariateMatrix, keep: &[usize]) -> CovariateMatrix {
    let names = x.names().to_vec();
    let columns = (0..x.n_cols())
        .map(|j| {
            let col = x.column(j);
            keep.iter().map(|&i| col[i]).collect()
        })
        .collect();
    CovariateMatrix::new(names, columns).expect("subset of a valid matrix stays valid")
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_shapes(
    x: &CovariateMatrix,
    z: &[f64],
    curves: &FunctionalSample,
) -> Result<(), SfplrError> {
    let n = curves.n();
    if x.n_rows() != n || z.len() != n {
        return Err(SfplrError::ShapeMismatch {
            curves: n,
            rows: x.n_rows(),
            responses: z.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::CalendarMonth;
    use crate::sfplr::SemiMetricSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_of(curves: Vec<Vec<f64>>) -> FunctionalSample {
        let tau = curves[0].len();
        FunctionalSample::new(curves, tau, CalendarMonth::new(2009, 1).unwrap()).unwrap()
    }

    fn random_problem(
        rng: &mut ChaCha8Rng,
        n: usize,
        p: usize,
    ) -> (CovariateMatrix, Vec<f64>, FunctionalSample) {
        let columns: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let names = (0..p).map(|j| format!("x{j}")).collect();
        let x = CovariateMatrix::new(names, columns).unwrap();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let curves: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        (x, z, sample_of(curves))
    }

    /// Plain OLS slopes via the shared QR routine, as the oracle.
    fn ols(x: &CovariateMatrix, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        let p = x.n_cols();
        let mut flat = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..p {
                flat[i * p + j] = x.column(j)[i];
            }
        }
        lstsq(&flat, n, p, z).unwrap().coef
    }

    #[test]
    fn zero_smoother_reduces_to_plain_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(4..10);
            let p = rng.gen_range(1..3.min(n - 1));
            let (x, z, _) = random_problem(&mut rng, n, p);
            let zero = vec![vec![0.0; n]; n];
            let beta = fit_beta_with_weights(&x, &z, &zero).unwrap();
            let reference = ols(&x, &z);
            for (a, b) in beta.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_smoother_reduces_to_centered_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..25 {
            let n = rng.gen_range(4..11);
            let p = rng.gen_range(1..4.min(n - 1));
            let (x, z, _) = random_problem(&mut rng, n, p);
            let uniform = vec![vec![1.0 / n as f64; n]; n];
            let beta = fit_beta_with_weights(&x, &z, &uniform).unwrap();

            let zbar = z.iter().sum::<f64>() / n as f64;
            let centered_z: Vec<f64> = z.iter().map(|v| v - zbar).collect();
            let centered_cols: Vec<Vec<f64>> = (0..p)
                .map(|j| {
                    let col = x.column(j);
                    let mean = col.iter().sum::<f64>() / n as f64;
                    col.iter().map(|v| v - mean).collect()
                })
                .collect();
            let names = x.names().to_vec();
            let centered = CovariateMatrix::new(names, centered_cols).unwrap();
            let reference = ols(&centered, &centered_z);
            for (a, b) in beta.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn duplicate_covariates_are_rejected_as_ill_conditioned() {
        let col = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x = CovariateMatrix::new(
            vec!["a".into(), "b".into()],
            vec![col.clone(), col],
        )
        .unwrap();
        let z = vec![1.0, 0.0, 2.0, 1.0, 3.0];
        let zero = vec![vec![0.0; 5]; 5];
        let err = fit_beta_with_weights(&x, &z, &zero).unwrap_err();
        assert!(matches!(err, SfplrError::IllConditioned { .. }));
    }

    #[test]
    fn more_covariates_than_observations_are_rejected() {
        let x = CovariateMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        )
        .unwrap();
        let err = fit_beta_with_weights(&x, &[1.0, 2.0], &vec![vec![0.0; 2]; 2]).unwrap_err();
        assert!(matches!(err, SfplrError::TooFewObservations { n: 2, p: 2 }));
    }

    fn toy_model(beta: Vec<f64>, h: f64, z: Vec<f64>, curves: Vec<Vec<f64>>) -> SfplrModel {
        let n = z.len();
        let x = if beta.is_empty() {
            CovariateMatrix::empty(n)
        } else {
            CovariateMatrix::new(
                (0..beta.len()).map(|j| format!("x{j}")).collect(),
                (0..beta.len())
                    .map(|j| (0..n).map(|i| ((i + j) % 3) as f64).collect())
                    .collect(),
            )
            .unwrap()
        };
        SfplrModel {
            beta,
            h,
            kernel: Kernel::default(),
            metric: SemiMetric::new(SemiMetricSpec::EuclidGrid),
            train_curves: sample_of(curves),
            train_x: x,
            train_z: z,
            target: TargetSpec::MonthValue { month_index: 0 },
        }
    }

    #[test]
    fn constant_responses_smooth_to_the_constant() {
        let curves: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 1.0]).collect();
        let model = toy_model(Vec::new(), 100.0, vec![4.25; 5], curves);
        let m = model.estimate_m(&[2.2, 0.4]).unwrap();
        assert!((m.value - 4.25).abs() < 1e-12);
        assert!(!m.nearest_fallback);
    }

    #[test]
    fn a_tiny_bandwidth_turns_a_training_curve_into_a_point_mass() {
        let curves = vec![
            vec![0.0, 0.0],
            vec![10.0, 0.0],
            vec![0.0, 10.0],
        ];
        let z = vec![1.0, 2.0, 3.0];
        let model = toy_model(vec![0.5], 0.01, z, curves.clone());
        let expected = model.train_z[1] - 0.5 * model.train_x.column(0)[1];
        let m = model.estimate_m(&curves[1]).unwrap();
        assert_eq!(m.value, expected);
        assert!(!m.nearest_fallback);
    }

    #[test]
    fn empty_neighborhoods_fall_back_to_the_nearest_curve() {
        let curves = vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 12.0]];
        let z = vec![1.0, 2.0, 3.0];
        let model = toy_model(Vec::new(), 0.5, z, curves);
        // Query far from everything; nearest is curve 1.
        let m = model.estimate_m(&[14.0, 0.0]).unwrap();
        assert_eq!(m.value, 2.0);
        assert!(m.nearest_fallback);
    }

    #[test]
    fn permuting_the_training_set_leaves_estimates_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 9;
        let (x, z, curves) = random_problem(&mut rng, n, 2);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        let h = 1.5;
        let model = SfplrModel::fit(
            &curves,
            &x,
            &z,
            h,
            Kernel::default(),
            metric.clone(),
            TargetSpec::MonthValue { month_index: 0 },
        )
        .unwrap();

        let perm: Vec<usize> = vec![4, 0, 7, 2, 8, 1, 6, 3, 5];
        let curves_p = sample_of(perm.iter().map(|&i| curves.curve(i).to_vec()).collect());
        let x_p = subset_matrix(&x, &perm);
        let z_p: Vec<f64> = perm.iter().map(|&i| z[i]).collect();
        let model_p = SfplrModel::fit(
            &curves_p,
            &x_p,
            &z_p,
            h,
            Kernel::default(),
            metric,
            TargetSpec::MonthValue { month_index: 0 },
        )
        .unwrap();

        let query: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = model.estimate_m(&query).unwrap().value;
        let b = model_p.estimate_m(&query).unwrap().value;
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn scaling_curves_and_bandwidth_together_changes_nothing() {
        let curves = vec![
            vec![1.0, 2.0, 0.5],
            vec![0.0, 1.5, 2.5],
            vec![2.0, 0.0, 1.0],
            vec![1.2, 1.2, 1.2],
        ];
        let z = vec![3.0, -1.0, 2.0, 0.5];
        let h = 2.0;
        let c = 37.5;
        let model = toy_model(vec![0.25], h, z.clone(), curves.clone());
        let scaled_curves: Vec<Vec<f64>> =
            curves.iter().map(|cu| cu.iter().map(|v| v * c).collect()).collect();
        let mut scaled = toy_model(vec![0.25], h * c, z, scaled_curves);
        scaled.train_x = model.train_x.clone();

        let query = vec![0.8, 1.1, 1.9];
        let scaled_query: Vec<f64> = query.iter().map(|v| v * c).collect();
        let a = model.estimate_m(&query).unwrap().value;
        let b = scaled.estimate_m(&scaled_query).unwrap().value;
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn prediction_reduces_to_each_part_when_the_other_vanishes() {
        let curves = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]];
        // No linear part: prediction is the smoothed value.
        let model = toy_model(Vec::new(), 10.0, vec![1.0, 2.0, 3.0], curves.clone());
        let p = model.predict(&[], &[0.2, 0.7]).unwrap();
        let m = model.estimate_m(&[0.2, 0.7]).unwrap();
        assert_eq!(p.raw, m.value);

        // Responses exactly X·β: partial residuals vanish and prediction is
        // the linear term alone.
        let x = CovariateMatrix::new(
            vec!["a".into()],
            vec![vec![1.0, 2.0, 3.0]],
        )
        .unwrap();
        let model = SfplrModel {
            beta: vec![2.0],
            h: 10.0,
            kernel: Kernel::default(),
            metric: SemiMetric::new(SemiMetricSpec::EuclidGrid),
            train_curves: sample_of(curves),
            train_x: x,
            train_z: vec![2.0, 4.0, 6.0],
            target: TargetSpec::MonthValue { month_index: 0 },
        };
        let p = model.predict(&[5.0], &[0.5, 0.5]).unwrap();
        assert!((p.raw - 10.0).abs() < 1e-12);

        let p = model.predict(&[-5.0], &[0.5, 0.5]).unwrap();
        assert_eq!(p.value, 0.0);
        assert!((p.raw + 10.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_prediction_row_width_is_rejected() {
        let curves = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let model = toy_model(vec![1.0, -1.0], 5.0, vec![1.0, 2.0], curves);
        let err = model.predict(&[1.0], &[0.0, 0.0]).unwrap_err();
        assert!(matches!(err, SfplrError::CovariateCount { expected: 2, got: 1 }));
    }

    fn cv_problem(rng: &mut ChaCha8Rng, n: usize) -> (CovariateMatrix, Vec<f64>, FunctionalSample) {
        let curves: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(0.0..2.0);
                (0..8).map(|t| a + 0.1 * (t as f64)).collect()
            })
            .collect();
        let x_col: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z: Vec<f64> = curves
            .iter()
            .zip(&x_col)
            .map(|(c, xv)| 2.0 * xv + c[0] * c[0] + 0.01 * rng.gen_range(-1.0..1.0))
            .collect();
        let x = CovariateMatrix::new(vec!["x".into()], vec![x_col]).unwrap();
        (x, z, sample_of(curves))
    }

    #[test]
    fn single_candidate_grids_select_that_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (x, z, curves) = cv_problem(&mut rng, 12);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        let h = cv_bandwidth(&x, &z, &curves, Kernel::default(), &metric, &[0.9]).unwrap();
        assert_eq!(h, 0.9);
    }

    #[test]
    fn duplicate_grid_entries_do_not_change_the_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (x, z, curves) = cv_problem(&mut rng, 12);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        let grid = [0.4, 0.9, 1.7, 3.0];
        let doubled = [0.9, 0.4, 3.0, 0.9, 1.7, 0.4, 3.0, 1.7];
        let a = cv_bandwidth(&x, &z, &curves, Kernel::default(), &metric, &grid).unwrap();
        let b = cv_bandwidth(&x, &z, &curves, Kernel::default(), &metric, &doubled).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tied_scores_pick_the_smallest_bandwidth() {
        // With one curve pair far beyond both candidates' reach and the rest
        // identical, scores tie exactly; the smaller h must win.
        let curves = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![0.0, 0.1],
            vec![0.1, 0.1],
        ];
        let z = vec![1.0, 1.1, 0.9, 1.0];
        let x = CovariateMatrix::new(vec!["x".into()], vec![vec![0.3, -0.2, 0.4, 0.1]]).unwrap();
        let sample = sample_of(curves);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        // Both candidates dwarf every pairwise distance, so all kernel
        // arguments are ~0 and the weights (hence scores) are identical.
        let h = cv_bandwidth(&x, &z, &sample, Kernel::default(), &metric, &[2e9, 1e9]).unwrap();
        assert_eq!(h, 1e9);
    }

    #[test]
    fn hopeless_bandwidths_are_excluded_and_reported() {
        let curves = vec![vec![0.0, 0.0], vec![5.0, 0.0], vec![0.0, 5.0], vec![5.0, 5.0]];
        let z = vec![1.0, 2.0, 3.0, 4.0];
        let x = CovariateMatrix::empty(4);
        let sample = sample_of(curves);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        // Every curve's nearest neighbour is at distance 5; h=0.1 leaves all
        // held-out points with zero mass.
        let err =
            cv_bandwidth(&x, &z, &sample, Kernel::default(), &metric, &[0.1]).unwrap_err();
        assert!(matches!(err, SfplrError::AllBandwidthsDegenerate));
        // Adding one workable candidate rescues the selection.
        let h = cv_bandwidth(&x, &z, &sample, Kernel::default(), &metric, &[0.1, 20.0]).unwrap();
        assert_eq!(h, 20.0);
    }

    #[test]
    fn empty_grids_are_rejected() {
        let curves = vec![vec![0.0], vec![1.0], vec![2.0]];
        let z = vec![0.0, 1.0, 2.0];
        let x = CovariateMatrix::empty(3);
        let sample = sample_of(curves);
        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        let err = cv_bandwidth(&x, &z, &sample, Kernel::default(), &metric, &[]).unwrap_err();
        assert!(matches!(err, SfplrError::EmptyBandwidthGrid));
    }
}
