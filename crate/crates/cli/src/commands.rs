//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use yawrate_core::cnp::{Checkpoint, D_X};
use yawrate_core::eval::{
    run_friction_experiment, run_mass_experiment, run_scenario_experiment, run_vehicle_experiment, EvalConfig,
    EvalReport,
};
use yawrate_core::meta::{generate_meta, load_meta, save_meta, MetaDataset, Split};
use yawrate_core::sim::{scenario_catalog, CatalogSet, SimOptions, DEFAULT_DT, TRAINING_FRICTIONS};
use yawrate_core::train::{train_with, write_curve, TrainConfig};
use yawrate_core::vehicle::VehicleParams;
use yawrate_core::{Error, Result};

use crate::config::{parse_list, Config};
use crate::csv_io::read_columns;
use crate::{Cli, Command, EvalArgs, Experiment, GenerateArgs, PredictArgs, TrainArgs};

pub const DEFAULT_SEED: u64 = 42;

pub fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    if let Some(jobs) = config.pick(cli.jobs, "jobs")? {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot size the thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => generate(a, &config),
        Command::Train(a) => train(a, &config),
        Command::Eval(a) => eval(a, &config),
        Command::Predict(a) => predict(a, &config),
    }
}

fn required(path: Option<PathBuf>, config: &Config, key: &str) -> Result<PathBuf> {
    path.or_else(|| config.raw(key).map(PathBuf::from))
        .filter(|p| !p.as_os_str().is_empty())
        .ok_or_else(|| Error::InvalidArgument(format!("--{key} is required")))
}

/// A bundled vehicle id, or a path to a parameter file.
fn resolve_vehicle(name: &str) -> Result<VehicleParams> {
    let path = Path::new(name);
    if path.extension().is_some() || path.exists() {
        VehicleParams::load(path)
    } else {
        VehicleParams::bundled(name)
    }
}

fn vehicle_list(flag: Option<String>, config: &Config, default: &[&str]) -> Result<Vec<VehicleParams>> {
    let text = flag.or_else(|| config.raw("vehicles").map(String::from));
    match text {
        Some(t) => t.split(',').map(|s| resolve_vehicle(s.trim())).collect(),
        None => default.iter().map(|id| VehicleParams::bundled(id)).collect(),
    }
}

fn friction_list(flag: Option<String>, config: &Config) -> Result<Option<Vec<f64>>> {
    flag.or_else(|| config.raw("friction").map(String::from))
        .map(|t| parse_list(&t))
        .transpose()
}

fn generate(a: GenerateArgs, config: &Config) -> Result<()> {
    let dir = required(a.dataset_dir, config, "dataset-dir")?;
    let seed = config.pick(a.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let dt = config.pick(a.dt, "dt")?.unwrap_or(DEFAULT_DT);
    let frictions = friction_list(a.friction, config)?.unwrap_or_else(|| TRAINING_FRICTIONS.to_vec());
    let mass_extra = config.pick(a.mass_extra, "mass-extra")?.unwrap_or(0.0);
    let vehicles = vehicle_list(a.vehicles, config, &["default"])?;
    let (set, opts) = if a.held_out {
        (CatalogSet::HeldOut, SimOptions::default().with_off_road())
    } else {
        (CatalogSet::Training, SimOptions::default())
    };

    let catalog = scenario_catalog(seed);
    let mut meta = MetaDataset::default();
    for vehicle in &vehicles {
        let scenarios = catalog.instances(set, &frictions, mass_extra, dt);
        for s in &scenarios {
            s.validate()?;
        }
        let (part, failures) = generate_meta(&scenarios, vehicle, &opts, seed);
        for f in failures {
            eprintln!("warning: {} ({}): {}", f.scenario, vehicle.id, f.reason);
        }
        meta.tasks.extend(part.tasks);
    }
    if meta.is_empty() {
        return Err(Error::InvalidArgument("no scenario produced a usable series".into()));
    }
    let manifest = save_meta(&meta, &dir)?;
    println!(
        "{} tasks ({} train, {} val) written to {}",
        meta.len(),
        meta.indices(Split::Train).len(),
        meta.indices(Split::Val).len(),
        manifest.display()
    );
    Ok(())
}

fn train(a: TrainArgs, config: &Config) -> Result<()> {
    let dataset = required(a.dataset_dir, config, "dataset-dir")?;
    let checkpoint = required(a.checkpoint, config, "checkpoint")?;
    let defaults = TrainConfig::default();
    let cfg = TrainConfig {
        lr: config.pick(a.lr, "lr")?.unwrap_or(defaults.lr),
        batch_size: config.pick(a.batch_size, "batch-size")?.unwrap_or(defaults.batch_size),
        max_steps: config.pick(a.max_steps, "max-steps")?.unwrap_or(defaults.max_steps),
        patience: config.pick(a.patience, "patience")?.unwrap_or(defaults.patience),
        eval_every: config.pick(a.eval_every, "eval-every")?.unwrap_or(defaults.eval_every),
        seed: config.pick(a.seed, "seed")?.unwrap_or(DEFAULT_SEED),
        ..defaults
    };
    let meta = load_meta(&dataset)?;
    let init = if a.resume { Some(Checkpoint::load(&checkpoint)?.model) } else { None };
    let outcome = train_with(&meta, &cfg, init, |p| {
        eprintln!("step {:>6}  train NLL {:>9.4}  val NLL {:>9.4}", p.step, p.train_nll, p.val_nll);
    })?;
    outcome.checkpoint.save(&checkpoint)?;
    let curve = a.curve.unwrap_or_else(|| checkpoint.with_extension("curve.csv"));
    write_curve(&curve, &outcome.curve)?;
    println!(
        "best val NLL {:.6} at step {} of {}{}; checkpoint {}",
        outcome.checkpoint.best_val_nll,
        outcome.checkpoint.step,
        outcome.steps,
        if outcome.stopped_early { " (early stop)" } else { "" },
        checkpoint.display()
    );
    Ok(())
}

fn eval(a: EvalArgs, config: &Config) -> Result<()> {
    let checkpoint = required(a.checkpoint, config, "checkpoint")?;
    let report_dir = required(a.report_dir, config, "report-dir")?;
    let experiment = match a.experiment {
        Some(e) => e,
        None => match config.raw("experiment") {
            None => Experiment::All,
            Some(s) => <Experiment as clap::ValueEnum>::from_str(s, true)
                .map_err(|_| Error::InvalidArgument(format!("unknown experiment `{s}`")))?,
        },
    };
    let seed = config.pick(a.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let defaults = EvalConfig::default();
    let cfg = EvalConfig {
        context_fraction: config.pick(a.context_fraction, "context-fraction")?.unwrap_or(defaults.context_fraction),
        dt: config.pick(a.dt, "dt")?.unwrap_or(defaults.dt),
        friction_conditions: friction_list(a.friction, config)?.unwrap_or(defaults.friction_conditions.clone()),
        ..defaults
    };
    let vehicle = resolve_vehicle(&a.vehicle.or_else(|| config.raw("vehicle").map(String::from)).unwrap_or("default".into()))?;
    let all: Vec<&str> = yawrate_core::vehicle::BUNDLED.iter().map(|(id, _)| *id).collect();
    let vehicles = vehicle_list(a.vehicles, config, &all)?;

    let model = Checkpoint::load(&checkpoint)?.model;
    let catalog = scenario_catalog(seed);
    let selected: Vec<Experiment> = match experiment {
        Experiment::All => vec![Experiment::Friction, Experiment::Mass, Experiment::Scenario, Experiment::Vehicle],
        one => vec![one],
    };
    for e in selected {
        let report: EvalReport = match e {
            Experiment::Friction => run_friction_experiment(&model, &vehicle, &catalog, &cfg)?,
            Experiment::Mass => run_mass_experiment(&model, &vehicle, &catalog, &cfg)?,
            Experiment::Scenario => run_scenario_experiment(&model, &vehicle, &catalog, &cfg)?,
            Experiment::Vehicle => run_vehicle_experiment(&model, &vehicles, &catalog, &cfg)?,
            Experiment::All => unreachable!("expanded above"),
        };
        let written = report.write(&report_dir)?;
        println!("{}", report.to_table());
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn predict(a: PredictArgs, config: &Config) -> Result<()> {
    let checkpoint = required(a.checkpoint, config, "checkpoint")?;
    let model = Checkpoint::load(&checkpoint)?.model;
    let context = read_columns(&a.context, &["delta", "v", "a_long", "psi_dot"])?;
    let targets = read_columns(&a.target, &["delta", "v", "a_long"])?;
    if context.is_empty() {
        return Err(Error::EmptyContext);
    }
    let row = |r: &Vec<f64>| -> [f64; D_X] { [r[0], r[1], r[2]] };
    let xs: Vec<[f64; D_X]> = context.iter().map(row).collect();
    let ys: Vec<f64> = context.iter().map(|r| r[3]).collect();
    let tx: Vec<[f64; D_X]> = targets.iter().map(row).collect();
    let preds = model.predict(&xs, &ys, &tx)?;

    let mut out = String::from("delta,v,a_long,mu,sigma2\n");
    for (x, p) in tx.iter().zip(&preds) {
        writeln!(out, "{},{},{},{},{}", x[0], x[1], x[2], p.mu, p.sigma2).expect("writing to a String cannot fail");
    }
    match a.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&path, out)?;
            eprintln!("{} predictions written to {}", preds.len(), path.display());
        }
        None => print!("{out}"),
    }
    Ok(())
}
