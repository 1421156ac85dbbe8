//! `yawrate`: dataset generation, CNP training, evaluation and prediction.

mod commands;
mod config;
mod csv_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use yawrate_core::Error;

#[derive(Debug, Parser)]
#[command(name = "yawrate", version, about = "Yaw-rate prediction with single-track models and conditional neural processes")]
pub struct Cli {
    /// Key-value file (`key = value`) supplying defaults for any flag; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for simulation, training and evaluation.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the scenario catalog and write a task dataset.
    Generate(GenerateArgs),
    /// Train a CNP on a generated dataset.
    Train(TrainArgs),
    /// Run the robustness experiments against a trained checkpoint.
    Eval(EvalArgs),
    /// Predict yaw rates for target inputs given a labeled context.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_name = "DIR")]
    pub dataset_dir: Option<PathBuf>,
    /// Seed of the scenario catalog and the validation split.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Comma-separated friction coefficients.
    #[arg(long, value_name = "LIST")]
    pub friction: Option<String>,
    /// Comma-separated vehicle ids or parameter files.
    #[arg(long, value_name = "LIST")]
    pub vehicles: Option<String>,
    /// Additional payload [kg].
    #[arg(long)]
    pub mass_extra: Option<f64>,
    /// Use the held-out scenario families instead of the training ones.
    #[arg(long)]
    pub held_out: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_name = "DIR")]
    pub dataset_dir: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Early-stopping patience in steps.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Validation interval in steps.
    #[arg(long)]
    pub eval_every: Option<usize>,
    /// Continue from the parameters stored at `--checkpoint`.
    #[arg(long)]
    pub resume: bool,
    /// Loss-curve CSV; defaults to `<checkpoint>.curve.csv`.
    #[arg(long, value_name = "FILE")]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Friction,
    Mass,
    Scenario,
    Vehicle,
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub report_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    /// Seed of the scenario catalog; must match the one used for training.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub context_fraction: Option<f64>,
    /// Frictions of the friction experiment.
    #[arg(long, value_name = "LIST")]
    pub friction: Option<String>,
    /// Vehicles of the vehicle experiment.
    #[arg(long, value_name = "LIST")]
    pub vehicles: Option<String>,
    /// Vehicle of the friction, mass and scenario experiments.
    #[arg(long)]
    pub vehicle: Option<String>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    /// CSV with columns delta, v, a_long, psi_dot (others are ignored).
    #[arg(long, value_name = "FILE")]
    pub context: PathBuf,
    /// CSV with columns delta, v, a_long (others are ignored).
    #[arg(long, value_name = "FILE")]
    pub target: PathBuf,
    /// Output CSV; standard output if omitted.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// Process exit codes.
pub mod exit {
    pub const BAD_ARGUMENTS: u8 = 2;
    pub const MISSING_INPUT: u8 = 3;
    pub const DIVERGENCE: u8 = 4;
    pub const OTHER: u8 = 1;
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::InvalidParams(_) | Error::InvalidScenario(_) => exit::BAD_ARGUMENTS,
        Error::MissingFile(_)
        | Error::MalformedManifest { .. }
        | Error::ChannelCount { .. }
        | Error::Parse(_)
        | Error::Checkpoint(_)
        | Error::EmptyContext
        | Error::TooShortSeries { .. } => exit::MISSING_INPUT,
        Error::Divergence { .. } | Error::TrajectoryDiverged { .. } => exit::DIVERGENCE,
        _ => exit::OTHER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
