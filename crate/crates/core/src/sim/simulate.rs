//! Time-stepping a vehicle model through a scenario.

use std::f64::consts::FRAC_PI_4;

use super::integrate::Integrator;
use super::scenario::Scenario;
use super::series::{EndReason, SeriesMeta, TimeSeries};
use crate::error::{Error, Result};
use crate::vehicle::{kst_yaw_rate, model_derivative, ControlInput, ModelKind, VehicleParams, VehicleState};

/// Any state component beyond this magnitude counts as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
/// Sideslip beyond which the vehicle is considered spinning [rad].
pub const SPIN_BETA: f64 = FRAC_PI_4;
/// Runs end once the vehicle is slower than this [m/s].
pub const V_STOP: f64 = 1.0;
/// Default time the lateral demand may exceed the grip before the vehicle
/// counts as off the road [s].
pub const OFF_ROAD_TIME: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    pub integrator: Integrator,
    /// End the run once the kinematic lateral demand `v^2 tan(delta) / l_wb`
    /// has exceeded `mu * g` for this long [s]. `None` disables the check.
    pub off_road_after: Option<f64>,
}

impl SimOptions {
    pub fn with_off_road(self) -> Self {
        Self {
            off_road_after: Some(OFF_ROAD_TIME),
            ..self
        }
    }
}

/// Vehicle parameters of a scenario: friction and payload applied to `p`.
pub fn scenario_params(scenario: &Scenario, p: &VehicleParams) -> VehicleParams {
    p.with_mu(scenario.mu).with_extra_mass(scenario.mass_extra)
}

/// Initial state of a scenario: straight, free rolling, steering at its
/// commanded value.
pub fn initial_state(scenario: &Scenario, p: &VehicleParams) -> VehicleState {
    let delta = scenario.steering.value(0.0);
    VehicleState {
        delta,
        psi_dot: kst_yaw_rate(scenario.v0, delta, p.l_wb),
        ..VehicleState::rolling(scenario.v0, p.r_w)
    }
}

/// Simulates `scenario` with forward Euler at the scenario's `dt`.
pub fn simulate(model: ModelKind, scenario: &Scenario, p: &VehicleParams) -> Result<TimeSeries> {
    simulate_with(model, scenario, p, &SimOptions::default())
}

/// Simulates `scenario` and records the measured channels. `p` is the
/// nominal vehicle; the scenario's friction and payload are applied on top.
/// The run ends early, with a shorter series, once the vehicle spins, stops
/// or (if enabled) leaves the road.
pub fn simulate_with(
    model: ModelKind,
    scenario: &Scenario,
    p: &VehicleParams,
    opts: &SimOptions,
) -> Result<TimeSeries> {
    scenario.validate()?;
    p.validate()?;
    let params = scenario_params(scenario, p);
    let dt = scenario.dt;
    let n = scenario.num_steps();
    let grip = params.mu * params.g;
    let mut over_grip = 0.0;

    let mut ts = TimeSeries {
        meta: SeriesMeta {
            scenario: scenario.id.clone(),
            mu: scenario.mu,
            vehicle: p.id.clone(),
            mass_extra: scenario.mass_extra,
            dt,
            end: EndReason::Complete,
        },
        ..TimeSeries::default()
    };
    let mut states = Vec::with_capacity(n);
    let mut state = initial_state(scenario, &params);
    let f = |s: &VehicleState, u: &ControlInput| model_derivative(model, s, u, &params);

    for k in 0..n {
        let t = k as f64 * dt;
        let u = ControlInput::new(scenario.steering.value(t), scenario.accel.value(t));
        ts.t.push(t);
        ts.delta.push(state.delta);
        ts.v.push(state.v);
        ts.a_long.push(u.a_long);
        ts.psi_dot.push(state.psi_dot);
        states.push(state);
        if k + 1 == n {
            break;
        }

        let demand = state.v * state.v * state.delta.tan().abs() / params.l_wb;
        over_grip = if demand > grip { over_grip + dt } else { 0.0 };
        let end = if state.beta.abs() > SPIN_BETA {
            Some(EndReason::Spun)
        } else if opts.off_road_after.is_some_and(|limit| over_grip >= limit - 1e-9) {
            Some(EndReason::LeftRoad)
        } else if state.v < V_STOP {
            Some(EndReason::Stopped)
        } else {
            None
        };
        if let Some(end) = end {
            ts.meta.end = end;
            break;
        }

        state = opts.integrator.step(f, &state, &u, dt)?;
        if model == ModelKind::Kst {
            // the kinematic yaw rate is algebraic; keep the state on it
            state.psi_dot = kst_yaw_rate(state.v, state.delta, params.l_wb);
            state.beta = 0.0;
        }
        if !state.is_finite() || state.max_abs() > DIVERGENCE_LIMIT {
            return Err(Error::TrajectoryDiverged { time: t + dt });
        }
    }
    if ts.len() < 2 {
        return Err(Error::TooShortSeries { len: ts.len(), min: 2 });
    }
    ts.states = Some(states);
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scenario::{scenario_catalog, CatalogSet, Profile, ScenarioKind, Shape, DEFAULT_DT};
    use approx::assert_relative_eq;

    fn straight(v0: f64, mu: f64, steering: Profile) -> Scenario {
        Scenario {
            id: "test".into(),
            template: "test".into(),
            kind: ScenarioKind::Lateral,
            duration: 6.0,
            dt: DEFAULT_DT,
            steering,
            accel: Profile::default(),
            v0,
            mu,
            mass_extra: 0.0,
        }
    }

    fn constant_steer(delta: f64) -> Profile {
        let mut p = Profile::default();
        p.push(0.0, Shape::Ramp { duration: 0.5, to: delta });
        p
    }

    #[test]
    fn zero_inputs_give_zero_yaw_rate() {
        let p = VehicleParams::default();
        let s = straight(10.0, 1.0, Profile::default());
        for model in ModelKind::ALL {
            let ts = simulate(model, &s, &p).unwrap();
            assert_eq!(ts.len(), s.num_steps());
            assert!(ts.psi_dot.iter().all(|&r| r == 0.0), "{model}");
            assert!(ts.v.iter().all(|&v| v == 10.0), "{model}");
        }
    }

    #[test]
    fn kst_steady_state_yaw_rate() {
        let p = VehicleParams {
            l_f: 1.2,
            l_r: 1.3,
            l_wb: 2.5,
            ..VehicleParams::default()
        };
        let ts = simulate(ModelKind::Kst, &straight(10.0, 1.0, constant_steer(0.1)), &p).unwrap();
        let last = *ts.psi_dot.last().unwrap();
        assert_relative_eq!(last, 0.4013386883418022, max_relative = 1e-9);
    }

    #[test]
    fn time_axis_is_uniform() {
        let p = VehicleParams::default();
        let ts = simulate(ModelKind::Std, &straight(15.0, 1.0, constant_steer(0.05)), &p).unwrap();
        ts.validate().unwrap();
        for w in ts.t.windows(2) {
            assert!((w[1] - w[0] - DEFAULT_DT).abs() < 1e-12);
        }
        assert_eq!(ts.states.as_ref().unwrap().len(), ts.len());
    }

    #[test]
    fn low_friction_reduces_peak_yaw_rate() {
        let p = VehicleParams::default();
        let dry = simulate(ModelKind::Std, &straight(20.0, 1.0, constant_steer(0.06)), &p).unwrap();
        let icy = simulate(ModelKind::Std, &straight(20.0, 0.2, constant_steer(0.06)), &p).unwrap();
        let peak = |ts: &TimeSeries| ts.psi_dot.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(peak(&icy) < peak(&dry), "{} vs {}", peak(&icy), peak(&dry));
        assert_eq!(icy.meta.end, EndReason::Complete);
    }

    #[test]
    fn off_road_check_truncates_icy_runs() {
        let p = VehicleParams::default();
        let s = straight(20.0, 0.2, constant_steer(0.06));
        let opts = SimOptions::default().with_off_road();
        let icy = simulate_with(ModelKind::Std, &s, &p, &opts).unwrap();
        assert_eq!(icy.meta.end, EndReason::LeftRoad);
        // demand exceeds grip once the ramp passes ~0.012 rad, i.e. within 0.1 s
        assert!(icy.len() < 130 && icy.len() > 100, "{}", icy.len());
        let full = simulate(ModelKind::Std, &s, &p).unwrap();
        assert_eq!(&full.psi_dot[..icy.len()], &icy.psi_dot[..]);
        let dry = simulate_with(ModelKind::Std, &straight(20.0, 1.0, constant_steer(0.02)), &p, &opts).unwrap();
        assert_eq!(dry.meta.end, EndReason::Complete);
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let p = VehicleParams::default();
        let mut s = straight(10.0, 1.0, Profile::default());
        s.mu = 0.0;
        assert!(matches!(simulate(ModelKind::Std, &s, &p), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn whole_catalog_simulates_under_std() {
        let p = VehicleParams::default();
        let catalog = scenario_catalog(42);
        for set in [CatalogSet::Training, CatalogSet::HeldOut] {
            for s in catalog.instances(set, &[1.0, 0.5, 0.2, 0.1], 0.0, DEFAULT_DT) {
                let ts = simulate(ModelKind::Std, &s, &p).unwrap_or_else(|e| panic!("{}: {e}", s.id));
                assert!(ts.len() >= 100, "{}: {} samples", s.id, ts.len());
            }
        }
    }
}
