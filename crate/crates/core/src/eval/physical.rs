//! Physical yaw-rate predictors and the error metric.

use crate::error::{Error, Result};
use crate::meta::TaskDataset;
use crate::sim::{euler_step, DIVERGENCE_LIMIT};
use crate::vehicle::{kst_yaw_rate, model_derivative, ControlInput, ModelKind, VehicleParams, VehicleState};

/// Predicted yaw rates are clamped to this magnitude before scoring [rad/s].
pub const YAW_RATE_CAP: f64 = 10.0;

/// Root-mean-square difference.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptySet);
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sum / pred.len() as f64).sqrt())
}

/// Model state at the last context step. The recorded simulator state is
/// used when the task carries it; otherwise speed, steering angle and yaw
/// rate come from the last context row with zero sideslip and free-rolling
/// wheels.
pub fn context_tail_state(task: &TaskDataset, p: &VehicleParams) -> Result<VehicleState> {
    if let Some(s) = task.initial_state {
        return Ok(s);
    }
    let (x, &psi_dot) = task
        .context_x
        .last()
        .zip(task.context_y.last())
        .ok_or(Error::EmptyContext)?;
    Ok(VehicleState {
        delta: x[0],
        psi_dot,
        ..VehicleState::rolling(x[1], p.r_w)
    })
}

/// Open-loop yaw-rate prediction over the task's targets: the model is
/// Euler-stepped from the context tail with the recorded steering angle and
/// commanded acceleration. The model's own speed is used, the target speed
/// channel is not consulted. KST reports its algebraic yaw rate. Values are
/// clamped to [`YAW_RATE_CAP`].
pub fn physical_predict(kind: ModelKind, p: &VehicleParams, task: &TaskDataset) -> Result<Vec<f64>> {
    p.validate()?;
    let mut state = context_tail_state(task, p)?;
    let mut a_prev = task.context_x.last().ok_or(Error::EmptyContext)?[2];
    let f = |s: &VehicleState, u: &ControlInput| model_derivative(kind, s, u, p);
    let mut out = Vec::with_capacity(task.target_x.len());
    for (j, x) in task.target_x.iter().enumerate() {
        // the steering actuator is bypassed: the angle is read from the record
        let u = ControlInput::new(state.delta, a_prev);
        state = euler_step(f, &state, &u, task.dt)?;
        state.delta = x[0];
        if kind == ModelKind::Kst {
            state.psi_dot = kst_yaw_rate(state.v, state.delta, p.l_wb);
            state.beta = 0.0;
        }
        if !state.is_finite() || state.max_abs() > DIVERGENCE_LIMIT {
            return Err(Error::TrajectoryDiverged {
                time: (j + 1) as f64 * task.dt,
            });
        }
        out.push(state.psi_dot.clamp(-YAW_RATE_CAP, YAW_RATE_CAP));
        a_prev = x[2];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::build_eval_task;
    use crate::sim::{scenario_catalog, simulate, CatalogSet, DEFAULT_DT};

    #[test]
    fn rmse_oracles() {
        assert_eq!(rmse(&[0.3, -1.0], &[0.3, -1.0]).unwrap(), 0.0);
        assert!((rmse(&[1.5, 2.5, -0.5], &[1.0, 2.0, -1.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((rmse(&[1.0, 2.0], &[2.0, 4.0]).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((rmse(&[1.0, 2.0], &[2.0, 4.0]).unwrap() - 1.5811388300841898).abs() < 1e-15);
        assert!(rmse(&[1.0], &[]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    fn scenario(template: &str, v: f64, mu: f64) -> crate::sim::Scenario {
        scenario_catalog(42)
            .templates(CatalogSet::Training)
            .iter()
            .find(|t| t.id == template)
            .unwrap()
            .instantiate(v, mu, 0.0, DEFAULT_DT)
    }

    #[test]
    fn std_with_true_parameters_reproduces_std_truth() {
        let p = VehicleParams::bundled("default").unwrap();
        for (t, mu) in [("lat_dlc_severe", 0.5), ("urban_grid", 1.0), ("lat_fishhook", 0.2)] {
            let s = scenario(t, 65.0, mu);
            let ts = simulate(ModelKind::Std, &s, &p).unwrap();
            let task = build_eval_task(&ts, 0.1).unwrap();
            let pred = physical_predict(ModelKind::Std, &p.with_mu(mu), &task).unwrap();
            assert!(rmse(&pred, &task.target_y).unwrap() < 1e-12, "{t}");
        }
    }

    #[test]
    fn straight_driving_is_predicted_by_every_model() {
        let p = VehicleParams::bundled("default").unwrap();
        let s = scenario("long_accel_brake", 60.0, 1.0);
        let mut s = s;
        s.steering = Default::default();
        let ts = simulate(ModelKind::Std, &s, &p).unwrap();
        let mut task = build_eval_task(&ts, 0.1).unwrap();
        for kind in ModelKind::ALL {
            let pred = physical_predict(kind, &p, &task).unwrap();
            assert!(rmse(&pred, &task.target_y).unwrap() < 1e-9, "{kind:?}");
        }
        // also from the context row alone
        task.initial_state = None;
        let pred = physical_predict(ModelKind::Kst, &p, &task).unwrap();
        assert!(rmse(&pred, &task.target_y).unwrap() < 1e-9);
    }

    #[test]
    fn kinematic_error_grows_on_ice() {
        let p = VehicleParams::bundled("default").unwrap();
        let err = |mu: f64| {
            let ts = simulate(ModelKind::Std, &scenario("lat_sine_05hz", 90.0, mu), &p).unwrap();
            let task = build_eval_task(&ts, 0.1).unwrap();
            rmse(&physical_predict(ModelKind::Kst, &p, &task).unwrap(), &task.target_y).unwrap()
        };
        assert!(err(0.2) > err(1.0));
    }

    #[test]
    fn fallback_initialization_from_context_row() {
        let p = VehicleParams::bundled("default").unwrap();
        let task = TaskDataset {
            context_x: vec![[0.02, 15.0, 0.0]],
            context_y: vec![0.11],
            target_x: vec![[0.02, 15.0, 0.0]; 3],
            dt: 0.01,
            ..TaskDataset::default()
        };
        let s = context_tail_state(&task, &p).unwrap();
        assert_eq!((s.v, s.delta, s.psi_dot, s.beta), (15.0, 0.02, 0.11, 0.0));
        assert_eq!(s.omega_f, 15.0 / p.r_w);
        let pred = physical_predict(ModelKind::Kst, &p, &task).unwrap();
        assert_eq!(pred.len(), 3);
        assert!((pred[0] - kst_yaw_rate(15.0, 0.02, p.l_wb)).abs() < 1e-12);
        let empty = TaskDataset::default();
        assert!(matches!(physical_predict(ModelKind::Kst, &p, &empty), Err(Error::EmptyContext)));
    }
}
