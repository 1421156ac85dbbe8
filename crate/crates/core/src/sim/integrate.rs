//! Fixed-step explicit integrators over [`VehicleState`].

use crate::error::Result;
use crate::vehicle::{ControlInput, StateDerivative, VehicleState, STATE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Forward Euler, used for data generation and prediction.
    #[default]
    Euler,
    /// Classical fourth-order Runge-Kutta, used as a reference.
    Rk4,
}

/// One forward Euler step `state + dt * f(state, u)`.
pub fn euler_step<F>(f: F, state: &VehicleState, u: &ControlInput, dt: f64) -> Result<VehicleState>
where
    F: Fn(&VehicleState, &ControlInput) -> Result<StateDerivative>,
{
    let d = f(state, u)?;
    Ok(state.advanced(&d, dt))
}

/// One classical Runge-Kutta step with the control held over the interval.
pub fn rk4_step<F>(f: F, state: &VehicleState, u: &ControlInput, dt: f64) -> Result<VehicleState>
where
    F: Fn(&VehicleState, &ControlInput) -> Result<StateDerivative>,
{
    let k1 = f(state, u)?;
    let k2 = f(&state.advanced(&k1, dt / 2.0), u)?;
    let k3 = f(&state.advanced(&k2, dt / 2.0), u)?;
    let k4 = f(&state.advanced(&k3, dt), u)?;
    let s = state.to_array();
    let (k1, k2, k3, k4) = (k1.to_array(), k2.to_array(), k3.to_array(), k4.to_array());
    let next: [f64; STATE_DIM] =
        std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    Ok(VehicleState::from_array(next))
}

impl Integrator {
    pub fn step<F>(&self, f: F, state: &VehicleState, u: &ControlInput, dt: f64) -> Result<VehicleState>
    where
        F: Fn(&VehicleState, &ControlInput) -> Result<StateDerivative>,
    {
        match self {
            Integrator::Euler => euler_step(f, state, u, dt),
            Integrator::Rk4 => rk4_step(f, state, u, dt),
        }
    }
}
