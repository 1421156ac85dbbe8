//! The four robustness experiments: friction, payload, unseen scenarios and
//! unseen vehicles. Ground truth is regenerated with the STD model for every
//! run; each predictor sees the first part of the run as context and predicts
//! the rest.

use rayon::prelude::*;

use super::physical::{physical_predict, rmse};
use super::report::{EvalReport, Qualitative, ReportRow, RunRecord};
use crate::cnp::{CnpModel, GaussianPrediction};
use crate::error::{Error, Result};
use crate::meta::{build_eval_task, TaskDataset};
use crate::sim::{
    scenario_params, simulate_with, Catalog, CatalogSet, Scenario, SimOptions, TimeSeries, DEFAULT_DT,
    EVAL_FRICTIONS, TRAINING_FRICTIONS,
};
use crate::vehicle::{ModelKind, VehicleParams};

/// Payload of the mass experiment: four occupants of 80 kg [kg].
pub const EXTRA_PAYLOAD: f64 = 320.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predictor {
    Kst,
    Dst,
    /// DST given the true friction (and payload).
    DstIdeal,
    Std,
    /// STD given the true friction (and payload).
    StdIdeal,
    Cnp,
}

impl Predictor {
    pub const ALL: [Predictor; 6] = [
        Predictor::Kst,
        Predictor::Dst,
        Predictor::DstIdeal,
        Predictor::Std,
        Predictor::StdIdeal,
        Predictor::Cnp,
    ];

    pub fn index(&self) -> usize {
        *self as usize
    }

    /// Display name; `with_mass` marks ideal predictors that also know the
    /// payload.
    pub fn label(&self, with_mass: bool) -> &'static str {
        match (self, with_mass) {
            (Predictor::Kst, _) => "KST",
            (Predictor::Dst, _) => "DST",
            (Predictor::DstIdeal, false) => "DST(mu)",
            (Predictor::DstIdeal, true) => "DST(mu,m)",
            (Predictor::Std, _) => "STD",
            (Predictor::StdIdeal, false) => "STD(mu)",
            (Predictor::StdIdeal, true) => "STD(mu,m)",
            (Predictor::Cnp, _) => "CNP",
        }
    }

    /// File-friendly name.
    pub fn slug(&self) -> &'static str {
        match self {
            Predictor::Kst => "kst",
            Predictor::Dst => "dst",
            Predictor::DstIdeal => "dst_ideal",
            Predictor::Std => "std",
            Predictor::StdIdeal => "std_ideal",
            Predictor::Cnp => "cnp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Share of every run used as context.
    pub context_fraction: f64,
    pub dt: f64,
    pub friction_conditions: Vec<f64>,
    pub mass_conditions: Vec<f64>,
    pub mass_extra: f64,
    /// Frictions of the scenario and vehicle experiments.
    pub scenario_conditions: Vec<f64>,
    /// Held-out family and speed of the qualitative trajectories.
    pub qualitative_template: String,
    pub qualitative_speed_kmh: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            context_fraction: 0.1,
            dt: DEFAULT_DT,
            friction_conditions: EVAL_FRICTIONS.to_vec(),
            mass_conditions: TRAINING_FRICTIONS.to_vec(),
            mass_extra: EXTRA_PAYLOAD,
            scenario_conditions: TRAINING_FRICTIONS.to_vec(),
            qualitative_template: "heldout_racetrack_gp".into(),
            qualitative_speed_kmh: 100.0,
        }
    }
}

/// Label of a friction condition, e.g. `0.35` or `1.0`.
pub fn condition_label(mu: f64) -> String {
    format!("{mu:?}")
}

/// Everything computed for one ground-truth run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDetail {
    pub record: RunRecord,
    pub series: TimeSeries,
    pub task: TaskDataset,
    /// Physical predictions by predictor index; `None` for failures.
    pub physical: [Option<Vec<f64>>; 5],
    pub cnp: Option<Vec<GaussianPrediction>>,
}

/// Runs every predictor on one scenario. `truth` is the nominal vehicle; the
/// scenario's friction and payload are applied for the ground truth and the
/// ideal predictors, while the fixed predictors keep `mu = 1` and the nominal
/// mass.
pub fn evaluate_run(
    model: &CnpModel,
    truth: &VehicleParams,
    scenario: &Scenario,
    opts: &SimOptions,
    group: &str,
    context_fraction: f64,
) -> Result<RunDetail> {
    let series = simulate_with(ModelKind::Std, scenario, truth, opts)?;
    let task = build_eval_task(&series, context_fraction)?;
    let fixed = truth.with_mu(1.0);
    let ideal = scenario_params(scenario, truth);
    let physical_setup = [
        (ModelKind::Kst, &fixed),
        (ModelKind::Dst, &fixed),
        (ModelKind::Dst, &ideal),
        (ModelKind::Std, &fixed),
        (ModelKind::Std, &ideal),
    ];
    let mut record = RunRecord {
        scenario: scenario.id.clone(),
        group: group.to_string(),
        condition: condition_label(scenario.mu),
        len: series.len(),
        context: task.context_x.len(),
        end: series.meta.end,
        rmse: [None; 6],
        errors: Vec::new(),
        inside_2sigma: 0,
        targets: 0,
    };
    let mut physical: [Option<Vec<f64>>; 5] = Default::default();
    for (i, (kind, p)) in physical_setup.into_iter().enumerate() {
        match physical_predict(kind, p, &task).and_then(|pred| rmse(&pred, &task.target_y).map(|r| (pred, r))) {
            Ok((pred, r)) => {
                record.rmse[i] = Some(r);
                physical[i] = Some(pred);
            }
            Err(e) => record.errors.push((Predictor::ALL[i], e.to_string())),
        }
    }
    let cnp = match model.predict(&task.context_x, &task.context_y, &task.target_x) {
        Ok(preds) => {
            let mu: Vec<f64> = preds.iter().map(|p| p.mu).collect();
            let r = rmse(&mu, &task.target_y)?;
            if r.is_finite() {
                record.rmse[Predictor::Cnp.index()] = Some(r);
            } else {
                record.errors.push((Predictor::Cnp, "non-finite prediction".into()));
            }
            record.targets = preds.len();
            record.inside_2sigma = preds
                .iter()
                .zip(&task.target_y)
                .filter(|(p, y)| (*y - p.mu).abs() <= 2.0 * p.sigma2.sqrt())
                .count();
            Some(preds)
        }
        Err(e) => {
            record.errors.push((Predictor::Cnp, e.to_string()));
            None
        }
    };
    Ok(RunDetail {
        record,
        series,
        task,
        physical,
        cnp,
    })
}

/// One ground-truth run to evaluate.
struct Job<'a> {
    scenario: Scenario,
    vehicle: &'a VehicleParams,
    group: String,
}

fn run_jobs(model: &CnpModel, jobs: &[Job], opts: &SimOptions, cfg: &EvalConfig) -> Vec<RunRecord> {
    jobs.par_iter()
        .map(|job| {
            match evaluate_run(model, job.vehicle, &job.scenario, opts, &job.group, cfg.context_fraction) {
                Ok(detail) => detail.record,
                Err(e) => RunRecord::failed(&job.scenario, &job.group, e.to_string()),
            }
        })
        .collect()
}

fn check_config(cfg: &EvalConfig) -> Result<()> {
    if !(cfg.context_fraction > 0.0 && cfg.context_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "context fraction must lie in (0, 1), got {}",
            cfg.context_fraction
        )));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", cfg.dt)));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn single_vehicle_report(
    id: &str,
    model: &CnpModel,
    vehicle: &VehicleParams,
    catalog: &Catalog,
    set: CatalogSet,
    frictions: &[f64],
    mass_extra: f64,
    opts: &SimOptions,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    check_config(cfg)?;
    let jobs: Vec<Job> = catalog
        .instances(set, frictions, mass_extra, cfg.dt)
        .into_iter()
        .map(|scenario| Job {
            scenario,
            vehicle,
            group: String::new(),
        })
        .collect();
    let runs = run_jobs(model, &jobs, opts, cfg);
    let conditions: Vec<String> = frictions.iter().map(|&m| condition_label(m)).collect();
    Ok(EvalReport {
        experiment: id.to_string(),
        with_mass: mass_extra > 0.0,
        rows: ReportRow::aggregate(id, mass_extra > 0.0, &[String::new()], &conditions, &runs),
        runs,
        qualitative: Vec::new(),
    })
}

/// Training scenarios at unseen frictions, nominal vehicle.
pub fn run_friction_experiment(
    model: &CnpModel,
    vehicle: &VehicleParams,
    catalog: &Catalog,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let opts = SimOptions::default();
    single_vehicle_report(
        "friction",
        model,
        vehicle,
        catalog,
        CatalogSet::Training,
        &cfg.friction_conditions,
        0.0,
        &opts,
        cfg,
    )
}

/// Training scenarios and frictions with an added payload. The ideal
/// predictors know friction and mass.
pub fn run_mass_experiment(
    model: &CnpModel,
    vehicle: &VehicleParams,
    catalog: &Catalog,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let opts = SimOptions::default();
    single_vehicle_report(
        "mass",
        model,
        vehicle,
        catalog,
        CatalogSet::Training,
        &cfg.mass_conditions,
        cfg.mass_extra,
        &opts,
        cfg,
    )
}

/// Held-out scenario families. Runs end early when the vehicle leaves the
/// road. Also produces one qualitative trajectory per friction.
pub fn run_scenario_experiment(
    model: &CnpModel,
    vehicle: &VehicleParams,
    catalog: &Catalog,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let opts = SimOptions::default().with_off_road();
    let mut report = single_vehicle_report(
        "scenario",
        model,
        vehicle,
        catalog,
        CatalogSet::HeldOut,
        &cfg.scenario_conditions,
        0.0,
        &opts,
        cfg,
    )?;
    let template = catalog
        .templates(CatalogSet::HeldOut)
        .iter()
        .find(|t| t.id == cfg.qualitative_template)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown held-out family `{}`", cfg.qualitative_template)))?;
    for &mu in &cfg.scenario_conditions {
        let scenario = template.instantiate(cfg.qualitative_speed_kmh, mu, 0.0, cfg.dt);
        let detail = evaluate_run(model, vehicle, &scenario, &opts, "", cfg.context_fraction)?;
        report.qualitative.push(Qualitative::from_detail(&detail));
    }
    Ok(report)
}

/// Held-out scenarios driven by each vehicle in `vehicles`. The CNP is not
/// retrained; the physical predictors use each vehicle's own parameters.
pub fn run_vehicle_experiment(
    model: &CnpModel,
    vehicles: &[VehicleParams],
    catalog: &Catalog,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    check_config(cfg)?;
    if vehicles.is_empty() {
        return Err(Error::InvalidArgument("vehicle experiment needs at least one vehicle".into()));
    }
    let opts = SimOptions::default().with_off_road();
    let scenarios = catalog.instances(CatalogSet::HeldOut, &cfg.scenario_conditions, 0.0, cfg.dt);
    let jobs: Vec<Job> = vehicles
        .iter()
        .flat_map(|v| {
            scenarios.iter().map(move |s| Job {
                scenario: s.clone(),
                vehicle: v,
                group: v.id.clone(),
            })
        })
        .collect();
    let runs = run_jobs(model, &jobs, &opts, cfg);
    let groups: Vec<String> = vehicles.iter().map(|v| v.id.clone()).collect();
    let conditions: Vec<String> = cfg.scenario_conditions.iter().map(|&m| condition_label(m)).collect();
    Ok(EvalReport {
        experiment: "vehicle".into(),
        with_mass: false,
        rows: ReportRow::aggregate("vehicle", false, &groups, &conditions, &runs),
        runs,
        qualitative: Vec::new(),
    })
}
