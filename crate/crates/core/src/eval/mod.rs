//! Physical baselines, RMSE and the robustness experiments.

mod experiments;
mod physical;
mod report;

pub use experiments::{
    condition_label, evaluate_run, run_friction_experiment, run_mass_experiment, run_scenario_experiment,
    run_vehicle_experiment, EvalConfig, Predictor, RunDetail, EXTRA_PAYLOAD,
};
pub use physical::{context_tail_state, physical_predict, rmse, YAW_RATE_CAP};
pub use report::{EvalReport, Qualitative, ReportRow, RunRecord, AVG, QUALITATIVE_HEADER, REPORT_HEADER};
