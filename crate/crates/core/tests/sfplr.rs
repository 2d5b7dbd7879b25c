//! Generative recovery tests for the semi-functional estimator: data planted
//! with known linear coefficients and a known smooth functional part must be
//! recovered within stated bands.

use epicast_core::calendar::CalendarMonth;
use epicast_core::series::{FunctionalSample, TimeSeries};
use epicast_core::sfplr::{
    build_dataset, cv_bandwidth, default_bandwidth_grid, prediction_row, CovariateMatrix,
    CovariateMode, Kernel, SemiMetric, SemiMetricSpec, SfplrModel, TargetSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const TAU: usize = 12;

fn origin() -> CalendarMonth {
    CalendarMonth::new(2009, 1).unwrap()
}

/// Smooth curve indexed by a level drawn from [0,1]; its mean recovers the
/// level up to tiny noise, so m(curve) below is effectively level².
fn random_curve(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let level: f64 = rng.gen_range(0.0..1.0);
    (0..TAU)
        .map(|t| {
            let phase = 2.0 * std::f64::consts::PI * t as f64 / TAU as f64;
            level + 0.3 * phase.sin() + 0.05 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect()
}

fn m_true(curve: &[f64]) -> f64 {
    let mean = curve.iter().sum::<f64>() / curve.len() as f64;
    mean * mean
}

struct Planted {
    curves: FunctionalSample,
    x: CovariateMatrix,
    z: Vec<f64>,
    held_curves: Vec<Vec<f64>>,
    held_x: Vec<Vec<f64>>,
    held_z: Vec<f64>,
}

/// Z = 2·X₁ − X₂ + m(Y) + ε with σ_ε = 0.1 and m = squared curve mean.
fn planted_problem(seed: u64, n_train: usize, n_held: usize) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gen_block = |n: usize| {
        let curves: Vec<Vec<f64>> = (0..n).map(|_| random_curve(&mut rng)).collect();
        let x1: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let z: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * x1[i] - x2[i]
                    + m_true(&curves[i])
                    + 0.1 * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        (curves, x1, x2, z)
    };
    let (curves, x1, x2, z) = gen_block(n_train);
    let (held_curves, h1, h2, held_z) = gen_block(n_held);
    Planted {
        curves: FunctionalSample::new(curves, TAU, origin()).unwrap(),
        x: CovariateMatrix::new(vec!["x1".into(), "x2".into()], vec![x1, x2]).unwrap(),
        z,
        held_curves,
        held_x: h1.into_iter().zip(h2).map(|(a, b)| vec![a, b]).collect(),
        held_z,
    }
}

#[test]
fn planted_coefficients_and_functional_part_are_recovered() {
    let problem = planted_problem(21, 200, 50);
    let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
    let grid = default_bandwidth_grid(&problem.curves, &metric).unwrap();
    let h = cv_bandwidth(
        &problem.x,
        &problem.z,
        &problem.curves,
        Kernel::default(),
        &metric,
        &grid,
    )
    .unwrap();
    let model = SfplrModel::fit(
        &problem.curves,
        &problem.x,
        &problem.z,
        h,
        Kernel::default(),
        metric,
        TargetSpec::MonthValue { month_index: 0 },
    )
    .unwrap();

    assert!(
        (model.beta[0] - 2.0).abs() < 0.1 && (model.beta[1] + 1.0).abs() < 0.1,
        "beta = {:?}",
        model.beta
    );

    let mae: f64 = problem
        .held_curves
        .iter()
        .map(|c| (model.estimate_m(c).unwrap().value - m_true(c)).abs())
        .sum::<f64>()
        / problem.held_curves.len() as f64;
    assert!(mae < 0.3, "held-out functional-part MAE = {mae}");
}

#[test]
fn cross_validated_bandwidth_is_near_the_oracle_choice() {
    let problem = planted_problem(22, 150, 60);
    let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
    let grid = default_bandwidth_grid(&problem.curves, &metric).unwrap();

    let held_mse = |h: f64| -> Option<f64> {
        let model = SfplrModel::fit(
            &problem.curves,
            &problem.x,
            &problem.z,
            h,
            Kernel::default(),
            metric.clone(),
            TargetSpec::MonthValue { month_index: 0 },
        )
        .ok()?;
        let mut sse = 0.0;
        for i in 0..problem.held_curves.len() {
            let p = model
                .predict(&problem.held_x[i], &problem.held_curves[i])
                .ok()?;
            sse += (p.raw - problem.held_z[i]).powi(2);
        }
        Some(sse / problem.held_curves.len() as f64)
    };

    let oracle = grid
        .iter()
        .filter_map(|&h| held_mse(h))
        .fold(f64::INFINITY, f64::min);
    let h_cv = cv_bandwidth(
        &problem.x,
        &problem.z,
        &problem.curves,
        Kernel::default(),
        &metric,
        &grid,
    )
    .unwrap();
    let cv_mse = held_mse(h_cv).unwrap();
    assert!(
        cv_mse <= 1.2 * oracle,
        "held-out MSE {cv_mse} at the selected bandwidth vs oracle best {oracle}"
    );
}

/// Recursive yearly system: each month of year k+1 is a linear covariate
/// effect plus a bounded smooth function of year k's curve, so the series'
/// own past curves genuinely inform next-year months.
fn yearly_system(seed: u64, years: usize) -> (TimeSeries, Vec<(String, TimeSeries)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = years * TAU;
    let x1: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let x2: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let mut y = Vec::with_capacity(total);
    for t in 0..TAU {
        y.push(6.0 + 0.5 * (t as f64).sin() + 0.1 * rng.sample::<f64, _>(StandardNormal));
    }
    for t in TAU..total {
        let last_year = &y[t - TAU..t];
        let mean: f64 = last_year.iter().sum::<f64>() / TAU as f64;
        y.push(
            6.0 + 2.0 * x1[t] - x2[t]
                + mean.sin()
                + 0.1 * rng.sample::<f64, _>(StandardNormal),
        );
    }
    let series = TimeSeries::from_values(origin(), y).unwrap();
    let covs = vec![
        (
            "x1".to_string(),
            TimeSeries::from_values(origin(), x1).unwrap(),
        ),
        (
            "x2".to_string(),
            TimeSeries::from_values(origin(), x2).unwrap(),
        ),
    ];
    (series, covs)
}

#[test]
fn monthly_predictions_beat_an_intercept_only_baseline() {
    let years = 14;
    let mut wins = 0;
    for seed in 0..100u64 {
        let (series, covs) = yearly_system(900 + seed, years);
        let values = series.values();
        let train_months = (years - 1) * TAU;
        let all_curves: Vec<Vec<f64>> = (0..years - 1)
            .map(|k| {
                (0..TAU)
                    .map(|j| values[k * TAU + j].unwrap())
                    .collect()
            })
            .collect();
        let train_sample = FunctionalSample::new(all_curves, TAU, origin()).unwrap();

        let metric = SemiMetric::new(SemiMetricSpec::EuclidGrid);
        let mut preds = Vec::with_capacity(TAU);
        let mut baseline = Vec::with_capacity(TAU);
        let mut actual = Vec::with_capacity(TAU);
        for m in 0..TAU {
            let target = TargetSpec::MonthValue { month_index: m };
            let ds =
                build_dataset(&train_sample, &covs, target, CovariateMode::Contemporaneous)
                    .unwrap();
            let fitted_metric = SemiMetric::fitted(metric.spec(), &ds.curves).unwrap();
            let grid = default_bandwidth_grid(&ds.curves, &fitted_metric).unwrap();
            let h = cv_bandwidth(&ds.x, &ds.z, &ds.curves, Kernel::default(), &fitted_metric, &grid)
                .unwrap();
            let model = SfplrModel::fit(
                &ds.curves,
                &ds.x,
                &ds.z,
                h,
                Kernel::default(),
                fitted_metric,
                target,
            )
            .unwrap();
            let x_new =
                prediction_row(&train_sample, &covs, target, CovariateMode::Contemporaneous)
                    .unwrap();
            let last_curve = train_sample.curve(train_sample.n() - 1).to_vec();
            preds.push(model.predict(&x_new, &last_curve).unwrap().value);
            baseline.push(ds.z.iter().sum::<f64>() / ds.z.len() as f64);
            actual.push(values[train_months + m].unwrap());
        }
        let nse = |p: &[f64]| {
            let mean = actual.iter().sum::<f64>() / actual.len() as f64;
            let sse: f64 = p.iter().zip(&actual).map(|(a, b)| (a - b).powi(2)).sum();
            let var: f64 = actual.iter().map(|v| (v - mean).powi(2)).sum();
            1.0 - sse / var
        };
        if nse(&preds) > nse(&baseline) {
            wins += 1;
        }
    }
    assert!(wins >= 90, "functional model won in only {wins}/100 runs");
}
