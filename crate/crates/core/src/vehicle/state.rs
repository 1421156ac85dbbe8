use std::f64::consts::FRAC_PI_2;

use super::VehicleParams;

pub const STATE_DIM: usize = 9;

/// Continuous state shared by the three single-track models. Fields a model
/// does not use are carried along unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Yaw angle [rad].
    pub psi: f64,
    /// Yaw rate [rad/s].
    pub psi_dot: f64,
    /// Speed of the center of gravity [m/s].
    pub v: f64,
    /// Sideslip angle at the center of gravity [rad].
    pub beta: f64,
    /// Front wheel steering angle [rad].
    pub delta: f64,
    /// Front and rear axle spin rates [rad/s].
    pub omega_f: f64,
    pub omega_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub x_dot: f64,
    pub y_dot: f64,
    pub psi_dot: f64,
    pub psi_ddot: f64,
    pub v_dot: f64,
    pub beta_dot: f64,
    pub delta_dot: f64,
    pub omega_f_dot: f64,
    pub omega_r_dot: f64,
}

impl VehicleState {
    /// Straight driving at speed `v` with free-rolling wheels.
    pub fn rolling(v: f64, r_w: f64) -> Self {
        Self {
            v,
            omega_f: v / r_w,
            omega_r: v / r_w,
            ..Self::default()
        }
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [
            self.x,
            self.y,
            self.psi,
            self.psi_dot,
            self.v,
            self.beta,
            self.delta,
            self.omega_f,
            self.omega_r,
        ]
    }

    pub fn from_array(a: [f64; STATE_DIM]) -> Self {
        let [x, y, psi, psi_dot, v, beta, delta, omega_f, omega_r] = a;
        Self {
            x,
            y,
            psi,
            psi_dot,
            v,
            beta,
            delta,
            omega_f,
            omega_r,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + dt * d`, field by field.
    pub fn advanced(&self, d: &StateDerivative, dt: f64) -> Self {
        let s = self.to_array();
        let d = d.to_array();
        Self::from_array(std::array::from_fn(|i| s[i] + dt * d[i]))
    }
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [
            self.x_dot,
            self.y_dot,
            self.psi_dot,
            self.psi_ddot,
            self.v_dot,
            self.beta_dot,
            self.delta_dot,
            self.omega_f_dot,
            self.omega_r_dot,
        ]
    }

    pub fn from_array(a: [f64; STATE_DIM]) -> Self {
        let [x_dot, y_dot, psi_dot, psi_ddot, v_dot, beta_dot, delta_dot, omega_f_dot, omega_r_dot] = a;
        Self {
            x_dot,
            y_dot,
            psi_dot,
            psi_ddot,
            v_dot,
            beta_dot,
            delta_dot,
            omega_f_dot,
            omega_r_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// `w * self + (1 - w) * other`, field by field.
    pub fn lerp(&self, other: &Self, w: f64) -> Self {
        let a = self.to_array();
        let b = other.to_array();
        Self::from_array(std::array::from_fn(|i| w * a[i] + (1.0 - w) * b[i]))
    }
}

/// Driver commands shared by all three models.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    /// Commanded steering angle [rad].
    pub delta_cmd: f64,
    /// Commanded longitudinal acceleration [m/s^2].
    pub a_long: f64,
}

impl ControlInput {
    pub fn new(delta_cmd: f64, a_long: f64) -> Self {
        debug_assert!(delta_cmd.abs() <= FRAC_PI_2);
        Self { delta_cmd, a_long }
    }

    /// Equivalent total wheel torque `m * a_long * R_w` [N m].
    pub fn drive_torque(&self, p: &VehicleParams) -> f64 {
        p.m * self.a_long * p.r_w
    }

    /// Total torque split onto the (front, rear) axles.
    pub fn axle_torques(&self, p: &VehicleParams) -> (f64, f64) {
        let t = self.drive_torque(p);
        let front = if t >= 0.0 { p.torque_split } else { p.brake_split };
        (front * t, (1.0 - front) * t)
    }
}

/// Maximum steering rate of the actuator [rad/s].
pub const MAX_STEER_RATE: f64 = 0.4;
/// Time constant of the steering actuator's first-order response [s].
pub const STEER_TIME_CONSTANT: f64 = 0.05;

/// Rate of the steering actuator tracking `delta_cmd`: first order with the
/// slope capped at [`MAX_STEER_RATE`].
pub fn steering_rate(delta: f64, delta_cmd: f64) -> f64 {
    ((delta_cmd - delta) / STEER_TIME_CONSTANT).clamp(-MAX_STEER_RATE, MAX_STEER_RATE)
}
