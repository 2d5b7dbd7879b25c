//! epicast: ingest monthly incidence data, compare forecasting models, and
//! write reports and charts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epicast_cli::commands;
use epicast_core::eval::Method;

#[derive(Parser)]
#[command(
    name = "epicast",
    version,
    about = "Monthly incidence forecasting: ingestion, model comparison, reports and plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Dataset manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    /// Run configuration (JSON)
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Arima,
    Arimax,
    Sfplr,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Arima => Method::Arima,
            MethodArg::Arimax => Method::Arimax,
            MethodArg::Sfplr => Method::Sfplr,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a spec file
    Synth {
        /// Generator spec (JSON)
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the spec
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the dataset and its manifest
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Fit models on the training window and print their parameters
    Fit {
        #[command(flatten)]
        io: InputArgs,
        /// Restrict to one region
        #[arg(long)]
        region: Option<String>,
        /// Restrict to one method
        #[arg(long)]
        method: Option<MethodArg>,
    },
    /// Write test-window forecasts for every region and method
    Forecast {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Score all methods on the test window and print the report
    Evaluate {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Evaluate and write report files, predictions and optional plots
    Compare {
        #[command(flatten)]
        io: InputArgs,
        /// Also write per-region SVG charts
        #[arg(long)]
        emit_plots: bool,
    },
    /// Write per-region charts of observed versus predicted values
    Plot {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Derive an oceanic index: 3-month running mean of SST anomalies
    OniFromSst {
        /// Monthly anomaly series (CSV)
        #[arg(long)]
        input: PathBuf,
        /// Output series path (CSV)
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth {
            spec,
            seed,
            out_dir,
        } => commands::synth(&spec, seed, &out_dir),
        Command::Fit { io, region, method } => commands::fit(
            &io.manifest,
            &io.config,
            region.as_deref(),
            method.map(Method::from),
        ),
        Command::Forecast { io } => commands::forecast(&io.manifest, &io.config),
        Command::Evaluate { io } => commands::evaluate(&io.manifest, &io.config),
        Command::Compare { io, emit_plots } => {
            commands::compare(&io.manifest, &io.config, emit_plots)
        }
        Command::Plot { io } => commands::plot(&io.manifest, &io.config),
        Command::OniFromSst { input, output } => commands::oni_from_sst(&input, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.exit_code())
        }
    }
}
