//! Scenarios, integrators and recorded time series.

mod integrate;
mod scenario;
mod series;
mod simulate;

pub use integrate::{euler_step, rk4_step, Integrator};
pub use scenario::{
    scenario_catalog, Catalog, CatalogSet, Profile, Scenario, ScenarioKind, ScenarioTemplate, Segment,
    Shape, DEFAULT_DT, EVAL_FRICTIONS, TRAINING_FRICTIONS,
};
pub use series::{meta_path, EndReason, SeriesMeta, TimeSeries, CSV_HEADER};
pub use simulate::{
    initial_state, scenario_params, simulate, simulate_with, SimOptions, DIVERGENCE_LIMIT, OFF_ROAD_TIME,
    SPIN_BETA, V_STOP,
};
