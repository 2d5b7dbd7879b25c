//! Subcommand implementations. Failures carry the exit code split the
//! binary reports: data problems (files, parsing, alignment, windows) exit
//! 1, while runs where no model could be fit at all exit 2.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use epicast_core::arima::{fit_arima, fit_arimax, CovariateLag};
use epicast_core::eval::{
    choose_order, generate_synthetic, run_comparison, AlignedDataset, EvaluationReport, Method,
    SyntheticSpec,
};
use epicast_core::series::{segment, TimeSeries};
use epicast_core::sfplr::{
    build_dataset, cv_bandwidth, default_bandwidth_grid, CovariateMatrix, SemiMetric,
    SemiMetricSpec, SfplrModel, TargetSpec,
};

use crate::config::RunConfig;
use crate::csv::{parse_series_csv, write_series_csv};
use crate::ingest::{ingest, write_aligned, Ingested};
use crate::manifest::{file_slug, CalendarSpan, DatasetManifest};

/// A command failure, classified for the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad or missing input data: exit 1.
    Data(anyhow::Error),
    /// No model could be fit: exit 2.
    Fit(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Fit(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Data(e) | Failure::Fit(e) => e,
        }
    }
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

/// Generates a synthetic dataset and writes it in ingestible form, with the
/// planted parameters alongside.
pub fn synth(spec_path: &Path, seed: Option<u64>, out_dir: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(spec_path)
        .with_context(|| format!("{}", spec_path.display()))
        .map_err(Failure::Data)?;
    let mut spec: SyntheticSpec = serde_json::from_str(&text)
        .map_err(|e| data(anyhow!("{}:{}: {e}", spec_path.display(), e.line())))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let synth = generate_synthetic(&spec).map_err(data)?;

    let (_, first) = &synth.data.regions[0];
    let window = CalendarSpan {
        start: first.start(),
        end: first.end(),
    };
    let manifest_path = write_aligned(&synth.data, window, out_dir).map_err(data)?;
    let truth = serde_json::to_string_pretty(&synth.truth).expect("plain struct serializes");
    let truth_path = out_dir.join("ground_truth.json");
    fs::write(&truth_path, truth + "\n")
        .with_context(|| format!("{}", truth_path.display()))
        .map_err(Failure::Data)?;

    println!(
        "wrote {} regions x {} months ({}..{}) under {}",
        synth.data.regions.len(),
        first.len(),
        window.start,
        window.end,
        out_dir.display()
    );
    println!("manifest: {}", manifest_path.display());
    Ok(())
}

fn load_inputs(manifest_path: &Path, config_path: &Path) -> Result<(Ingested, RunConfig), Failure> {
    let manifest = DatasetManifest::load(manifest_path).map_err(data)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let ingested = ingest(&manifest, base).map_err(data)?;
    let config = RunConfig::load(config_path).map_err(data)?;
    for note in &ingested.notes {
        println!("{note}");
    }
    Ok((ingested, config))
}

fn run(ingested: &Ingested, config: &RunConfig) -> Result<EvaluationReport, Failure> {
    run_comparison(&ingested.data, &config.split, &config.comparison()).map_err(data)
}

/// Exit-2 condition: a completed run in which not a single cell fit.
fn require_any_fit(report: &EvaluationReport) -> Result<(), Failure> {
    if report.rows.iter().any(|row| row.outcome.is_ok()) {
        return Ok(());
    }
    let first = report
        .rows
        .first()
        .and_then(|row| row.outcome.as_ref().err())
        .cloned()
        .unwrap_or_default();
    Err(Failure::Fit(anyhow!(
        "every model fit failed; first failure: {first}"
    )))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::Data)
}

fn write_predictions(
    dir: &Path,
    report: &EvaluationReport,
    config: &RunConfig,
) -> Result<Vec<PathBuf>, Failure> {
    let (test_start, _) = config.split.test_window();
    let mut written = Vec::new();
    for row in &report.rows {
        let Ok(outcome) = &row.outcome else { continue };
        let series = TimeSeries::from_values(test_start, outcome.predictions.clone())
            .expect("horizon is positive");
        let path = dir.join(format!(
            "predictions_{}_{}.csv",
            file_slug(&row.region),
            row.method.name().to_lowercase()
        ));
        write_series_csv(&path, &series).map_err(data)?;
        written.push(path);
    }
    Ok(written)
}

fn write_plots(
    dir: &Path,
    ingested: &Ingested,
    report: &EvaluationReport,
    config: &RunConfig,
) -> Result<Vec<PathBuf>, Failure> {
    let (test_start, test_end) = config.split.test_window();
    let mut written = Vec::new();
    for (name, series) in &ingested.data.regions {
        let observed = series
            .window(series.start(), test_end)
            .expect("coverage was validated by the comparison");
        let predictions: Vec<(String, Vec<f64>)> = report
            .rows
            .iter()
            .filter(|row| row.region == *name)
            .filter_map(|row| {
                row.outcome
                    .as_ref()
                    .ok()
                    .map(|o| (row.method.name().to_string(), o.predictions.clone()))
            })
            .collect();
        let svg = crate::plot::region_chart(name, &observed, test_start, &predictions);
        let path = dir.join(format!("plot_{}.svg", file_slug(name)));
        write_text(&path, &svg)?;
        written.push(path);
    }
    Ok(written)
}

fn ensure_output_dir(config: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = config.output.dir.clone();
    fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(Failure::Data)?;
    Ok(dir)
}

/// Scores every region and method on the test window and prints the report
/// without writing anything.
pub fn evaluate(manifest_path: &Path, config_path: &Path) -> Result<(), Failure> {
    let (ingested, config) = load_inputs(manifest_path, config_path)?;
    let report = run(&ingested, &config)?;
    print!("{}", report.to_table());
    require_any_fit(&report)
}

/// Full comparison run: report files, per-cell predictions, the aligned
/// dataset the models saw, and optional charts.
pub fn compare(
    manifest_path: &Path,
    config_path: &Path,
    emit_plots: bool,
) -> Result<(), Failure> {
    let (ingested, config) = load_inputs(manifest_path, config_path)?;
    let report = run(&ingested, &config)?;
    let dir = ensure_output_dir(&config)?;

    write_text(&dir.join("report.csv"), &report.to_csv())?;
    write_text(&dir.join("report.txt"), &report.to_table())?;
    let mut written = write_predictions(&dir, &report, &config)?;
    write_aligned(&ingested.data, ingested.window, &dir.join("aligned")).map_err(data)?;
    if emit_plots || config.output.emit_plots {
        written.extend(write_plots(&dir, &ingested, &report, &config)?);
    }

    print!("{}", report.to_table());
    println!("report: {}", dir.join("report.csv").display());
    for path in &written {
        println!("wrote {}", path.display());
    }
    require_any_fit(&report)
}

/// Writes test-window forecasts for every region and method and prints them
/// as per-region tables.
pub fn forecast(manifest_path: &Path, config_path: &Path) -> Result<(), Failure> {
    let (ingested, config) = load_inputs(manifest_path, config_path)?;
    let report = run(&ingested, &config)?;
    let dir = ensure_output_dir(&config)?;
    let written = write_predictions(&dir, &report, &config)?;

    print!("{}", forecast_table(&report, &config));
    for path in &written {
        println!("wrote {}", path.display());
    }
    require_any_fit(&report)
}

fn forecast_table(report: &EvaluationReport, config: &RunConfig) -> String {
    let (test_start, _) = config.split.test_window();
    let mut out = String::new();
    let mut seen: Vec<&str> = Vec::new();
    for row in &report.rows {
        if seen.contains(&row.region.as_str()) {
            continue;
        }
        seen.push(&row.region);
        let cells: Vec<(&str, &Result<_, String>)> = report
            .rows
            .iter()
            .filter(|r| r.region == row.region)
            .map(|r| (r.method.name(), &r.outcome))
            .collect();

        let _ = writeln!(out, "{}", row.region);
        let _ = write!(out, "  {:<8}", "month");
        for (name, _) in &cells {
            let _ = write!(out, " {name:>9}");
        }
        let _ = writeln!(out);
        for k in 0..config.split.horizon {
            let _ = write!(out, "  {:<8}", test_start.plus_months(k as i64));
            for (_, outcome) in &cells {
                match outcome {
                    Ok(o) => {
                        let _ = write!(out, " {:>9.2}", o.predictions[k]);
                    }
                    Err(_) => {
                        let _ = write!(out, " {:>9}", "-");
                    }
                }
            }
            let _ = writeln!(out);
        }
        for (name, outcome) in &cells {
            if let Err(reason) = outcome {
                let _ = writeln!(out, "  {name} failed: {reason}");
            }
        }
    }
    out
}

/// Fits the selected models on the training window and prints their
/// parameters.
pub fn fit(
    manifest_path: &Path,
    config_path: &Path,
    region: Option<&str>,
    method: Option<Method>,
) -> Result<(), Failure> {
    let (ingested, config) = load_inputs(manifest_path, config_path)?;
    let dataset = &ingested.data;

    let regions: Vec<&(String, TimeSeries)> = match region {
        Some(want) => {
            let found = dataset.regions.iter().find(|(name, _)| name == want);
            let known = || {
                dataset
                    .regions
                    .iter()
                    .map(|(name, _)| name.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            vec![found
                .ok_or_else(|| data(anyhow!("unknown region `{want}`; manifest has: {}", known())))?]
        }
        None => dataset.regions.iter().collect(),
    };
    let methods: Vec<Method> = match method {
        Some(m) => vec![m],
        None => Method::ALL.to_vec(),
    };

    let mut attempted = 0usize;
    let mut failures = 0usize;
    let mut first_error = None;
    for (name, series) in regions {
        config
            .split
            .validate(series.start(), config.sfplr.tau)
            .map_err(data)?;
        let train = series
            .window(series.start(), config.split.train_end)
            .map_err(data)?;
        for &m in &methods {
            attempted += 1;
            match fit_summary(dataset, name, &train, m, &config) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    failures += 1;
                    println!("{name} {}: fit failed: {e:#}", m.name());
                    first_error.get_or_insert(e);
                }
            }
        }
    }
    if failures == attempted {
        return Err(Failure::Fit(first_error.expect("at least one attempt")));
    }
    Ok(())
}

fn fit_summary(
    data: &AlignedDataset,
    region: &str,
    train: &TimeSeries,
    method: Method,
    config: &RunConfig,
) -> anyhow::Result<String> {
    match method {
        Method::Arima => {
            let spec = choose_order(train, &config.arima)?;
            let model = fit_arima(train, spec)?;
            let mut out = arima_header(region, "ARIMA", &model);
            push_arma_lines(&mut out, &model);
            Ok(out)
        }
        Method::Arimax => {
            let spec = choose_order(train, &config.arima)?;
            let covariates =
                covariate_matrix(data, train.start(), config.split.train_end, train.len())?;
            let lags = if config.arimax.covariate_lags.is_empty() {
                (0..data.covariates.len())
                    .map(CovariateLag::contemporaneous)
                    .collect()
            } else {
                config.arimax.covariate_lags.clone()
            };
            let model = fit_arimax(train, &covariates, spec, &lags)?;
            let mut out = arima_header(region, "ARIMAX", &model.base);
            push_arma_lines(&mut out, &model.base);
            for (beta, lag) in model.beta_x.iter().zip(&model.covariate_lags) {
                let _ = write!(
                    out,
                    "\n  {}[lag {}]: {beta:.4}",
                    covariates.names()[lag.covariate],
                    lag.lag
                );
            }
            Ok(out)
        }
        Method::Sfplr => {
            let sample = segment(train, config.sfplr.tau)?.sample;
            let target = config.sfplr.target;
            let mode = config.sfplr.covariate_mode;
            let ds = build_dataset(&sample, &data.covariates, target, mode)?;
            let metric = SemiMetric::fitted(config.sfplr.metric, &ds.curves)?;
            let grid = match &config.sfplr.h_grid {
                Some(grid) => grid.clone(),
                None => default_bandwidth_grid(&ds.curves, &metric)?,
            };
            let h = cv_bandwidth(&ds.x, &ds.z, &ds.curves, config.sfplr.kernel, &metric, &grid)?;
            let model = SfplrModel::fit(
                &ds.curves,
                &ds.x,
                &ds.z,
                h,
                config.sfplr.kernel,
                metric,
                target,
            )?;
            let mut out = format!(
                "{region} SFPLR target={} metric={} h={h:.4} ({} curves)",
                target_label(target),
                metric_label(config.sfplr.metric),
                sample.n()
            );
            for (beta, name) in model.beta.iter().zip(ds.x.names()) {
                let _ = write!(out, "\n  {name}: {beta:.4}");
            }
            Ok(out)
        }
    }
}

fn arima_header(region: &str, label: &str, model: &epicast_core::arima::ArimaModel) -> String {
    let spec = model.spec;
    let mut out = format!("{region} {label}({},{},{})", spec.p, spec.d, spec.q);
    if let Some(bc) = &model.boxcox {
        let _ = write!(out, " lambda={:.3}", bc.lambda);
    }
    let _ = write!(out, " aicc={:.2} sigma2={:.4}", model.aicc, model.sigma2);
    out
}

fn push_arma_lines(out: &mut String, model: &epicast_core::arima::ArimaModel) {
    if !model.phi.is_empty() {
        let _ = write!(out, "\n  phi: {}", join_coefficients(&model.phi));
    }
    if !model.theta.is_empty() {
        let _ = write!(out, "\n  theta: {}", join_coefficients(&model.theta));
    }
    if model.spec.d == 0 {
        let _ = write!(out, "\n  mean: {:.4}", model.intercept);
    }
}

fn join_coefficients(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn metric_label(spec: SemiMetricSpec) -> String {
    match spec {
        SemiMetricSpec::EuclidGrid => "euclid_grid".into(),
        SemiMetricSpec::DerivGrid => "deriv_grid".into(),
        SemiMetricSpec::PcaQ { q } => format!("pca_q({q})"),
    }
}

fn target_label(target: TargetSpec) -> String {
    match target {
        TargetSpec::MonthValue { month_index } => format!("month_value[{month_index}]"),
        TargetSpec::PeriodSum => "period_sum".into(),
        TargetSpec::PeriodMax => "period_max".into(),
    }
}

fn covariate_matrix(
    data: &AlignedDataset,
    from: epicast_core::calendar::CalendarMonth,
    to: epicast_core::calendar::CalendarMonth,
    n_rows: usize,
) -> anyhow::Result<CovariateMatrix> {
    if data.covariates.is_empty() {
        return Ok(CovariateMatrix::empty(n_rows));
    }
    let names = data.covariates.iter().map(|(n, _)| n.clone()).collect();
    let columns = data
        .covariates
        .iter()
        .map(|(name, s)| {
            Ok(s.window(from, to)
                .with_context(|| format!("covariate {name}"))?
                .dense()
                .with_context(|| format!("covariate {name}"))?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(CovariateMatrix::new(names, columns)?)
}

/// Writes per-region charts of the observed series and each method's
/// test-window predictions.
pub fn plot(manifest_path: &Path, config_path: &Path) -> Result<(), Failure> {
    let (ingested, config) = load_inputs(manifest_path, config_path)?;
    let report = run(&ingested, &config)?;
    let dir = ensure_output_dir(&config)?;
    let written = write_plots(&dir, &ingested, &report, &config)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    require_any_fit(&report)
}

/// Derives an oceanic index from monthly SST anomalies: the centered
/// 3-month running mean, so the output starts and ends one month inside the
/// input's span.
pub fn oni_from_sst(input: &Path, output: &Path) -> Result<(), Failure> {
    let series = parse_series_csv(input).map_err(data)?;
    let values = series
        .dense()
        .map_err(|e| data(anyhow!("{}: {e}", input.display())))?;
    if values.len() < 3 {
        return Err(data(anyhow!(
            "{}: need at least 3 months, got {}",
            input.display(),
            values.len()
        )));
    }
    let smoothed: Vec<f64> = values.windows(3).map(|w| (w[0] + w[1] + w[2]) / 3.0).collect();
    let out = TimeSeries::from_values(series.start().plus_months(1), smoothed)
        .expect("three input months give one output month");
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("{}", parent.display()))
            .map_err(Failure::Data)?;
    }
    write_series_csv(output, &out).map_err(data)?;
    println!(
        "wrote {} months ({}..{}) to {}",
        out.len(),
        out.start(),
        out.end(),
        output.display()
    );
    Ok(())
}
