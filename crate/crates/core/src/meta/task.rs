//! Context/target tasks cut from a single time series.

use crate::cnp::D_X;
use crate::error::{Error, Result};
use crate::sim::TimeSeries;
use crate::vehicle::VehicleState;

/// Shortest series accepted for evaluation tasks.
pub const MIN_EVAL_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskMeta {
    pub scenario: String,
    pub mu: f64,
    pub vehicle: String,
    pub mass_extra: f64,
}

impl TaskMeta {
    pub fn of(ts: &TimeSeries) -> Self {
        Self {
            scenario: ts.meta.scenario.clone(),
            mu: ts.meta.mu,
            vehicle: ts.meta.vehicle.clone(),
            mass_extra: ts.meta.mass_extra,
        }
    }
}

/// One few-shot regression problem: labeled context pairs and target inputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskDataset {
    pub context_x: Vec<[f64; D_X]>,
    pub context_y: Vec<f64>,
    pub target_x: Vec<[f64; D_X]>,
    /// Ground-truth yaw rate at the targets; used for scoring only.
    pub target_y: Vec<f64>,
    pub meta: TaskMeta,
    pub dt: f64,
    /// Simulator state at the last context step, when known.
    pub initial_state: Option<VehicleState>,
}

impl TaskDataset {
    pub fn validate(&self) -> Result<()> {
        if self.context_x.len() != self.context_y.len() {
            return Err(Error::LengthMismatch {
                left: self.context_x.len(),
                right: self.context_y.len(),
            });
        }
        if !self.target_y.is_empty() && self.target_x.len() != self.target_y.len() {
            return Err(Error::LengthMismatch {
                left: self.target_x.len(),
                right: self.target_y.len(),
            });
        }
        if self.context_x.is_empty() {
            return Err(Error::EmptyContext);
        }
        Ok(())
    }
}

/// Input row `[delta, v, a_long]` of step `k` with measured speed.
pub fn input_row(ts: &TimeSeries, k: usize) -> [f64; D_X] {
    [ts.delta[k], ts.v[k], ts.a_long[k]]
}

/// Target inputs for every step from `from` on. The speed channel is not the
/// measured one: it is Euler-integrated from the last context speed with the
/// commanded acceleration, as it would be in deployment.
pub fn build_target_inputs(ts: &TimeSeries, from: usize) -> Result<Vec<[f64; D_X]>> {
    if from >= ts.len() {
        return Err(Error::IndexOutOfRange {
            index: from,
            len: ts.len(),
        });
    }
    let dt = ts.meta.dt;
    let mut v_hat = if from == 0 {
        ts.v[0]
    } else {
        ts.v[from - 1] + dt * ts.a_long[from - 1]
    };
    let mut out = Vec::with_capacity(ts.len() - from);
    for k in from..ts.len() {
        out.push([ts.delta[k], v_hat, ts.a_long[k]]);
        v_hat += dt * ts.a_long[k];
    }
    Ok(out)
}

/// Number of context steps for a chronological split.
pub fn context_len(len: usize, fraction: f64) -> usize {
    // guard against 0.1 * 1230 = 123.00000000000001
    let n = (fraction * len as f64 - 1e-9).ceil() as usize;
    n.clamp(1, len.saturating_sub(1).max(1))
}

/// Evaluation task: the first `fraction` of the series is the context, the
/// rest are targets.
pub fn build_eval_task(ts: &TimeSeries, context_fraction: f64) -> Result<TaskDataset> {
    if !(context_fraction > 0.0 && context_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "context fraction must lie in (0, 1), got {context_fraction}"
        )));
    }
    if ts.len() < MIN_EVAL_LEN {
        return Err(Error::TooShortSeries {
            len: ts.len(),
            min: MIN_EVAL_LEN,
        });
    }
    let n = context_len(ts.len(), context_fraction);
    Ok(TaskDataset {
        context_x: (0..n).map(|k| input_row(ts, k)).collect(),
        context_y: ts.psi_dot[..n].to_vec(),
        target_x: build_target_inputs(ts, n)?,
        target_y: ts.psi_dot[n..].to_vec(),
        meta: TaskMeta::of(ts),
        dt: ts.meta.dt,
        initial_state: ts.states.as_ref().map(|s| s[n - 1]),
    })
}
