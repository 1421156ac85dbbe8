//! Continuous dynamics of the kinematic (KST), dynamic (DST) and drift (STD)
//! single-track models.
//!
//! Every function here is pure: the same inputs always produce bit-identical
//! outputs.

use std::fmt;
use std::str::FromStr;

use super::state::steering_rate;
use super::tire::{
    cornering_stiffness, longitudinal_slip, pacejka_combined, slip_angles, tire_contact_velocities,
    vertical_forces, TireForces, EPS_V,
};
use super::{ControlInput, StateDerivative, VehicleParams, VehicleState};
use crate::error::{Error, Result};

/// Below this speed the dynamic model is replaced by the kinematic one.
pub const V_MIN_DST: f64 = 0.1;
/// Speed window over which the drift model is blended in.
pub const BLEND_LOW: f64 = 0.1;
pub const BLEND_HIGH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Kst,
    Dst,
    Std,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Kst, ModelKind::Dst, ModelKind::Std];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Kst => "KST",
            ModelKind::Dst => "DST",
            ModelKind::Std => "STD",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kst" => Ok(ModelKind::Kst),
            "dst" => Ok(ModelKind::Dst),
            "std" => Ok(ModelKind::Std),
            _ => Err(Error::InvalidArgument(format!("unknown model `{s}`"))),
        }
    }
}

/// Kinematic yaw rate `v / l_wb * tan(delta)`.
pub fn kst_yaw_rate(v: f64, delta: f64, l_wb: f64) -> f64 {
    v / l_wb * delta.tan()
}

/// Kinematic single-track model. The yaw rate is algebraic in `(v, delta)`;
/// its derivative is the exact time derivative of [`kst_yaw_rate`] along the
/// returned `v_dot` and `delta_dot`. Sideslip is frozen and the wheels roll
/// freely.
pub fn kst_derivative(state: &VehicleState, u: &ControlInput, p: &VehicleParams) -> StateDerivative {
    let VehicleState { psi, v, delta, .. } = *state;
    let delta_dot = steering_rate(delta, u.delta_cmd);
    let v_dot = u.a_long;
    let cos_d = delta.cos();
    StateDerivative {
        x_dot: v * psi.cos(),
        y_dot: v * psi.sin(),
        psi_dot: kst_yaw_rate(v, delta, p.l_wb),
        psi_ddot: (v_dot * delta.tan() + v * delta_dot / (cos_d * cos_d)) / p.l_wb,
        v_dot,
        beta_dot: 0.0,
        delta_dot,
        omega_f_dot: v_dot / p.r_w,
        omega_r_dot: v_dot / p.r_w,
    }
}

/// Linear axle forces `(F_f, F_r)` of the dynamic model. Their moments about
/// the center of gravity reproduce the DST yaw acceleration exactly.
pub fn dst_axle_forces(state: &VehicleState, u: &ControlInput, p: &VehicleParams) -> Result<(f64, f64)> {
    let (c_f, c_r) = dst_stiffness(p, u.a_long)?;
    let VehicleState {
        psi_dot,
        v,
        beta,
        delta,
        ..
    } = *state;
    let f_f = c_f * (delta - beta - p.l_f * psi_dot / v);
    let f_r = c_r * (-beta + p.l_r * psi_dot / v);
    Ok((f_f, f_r))
}

fn dst_stiffness(p: &VehicleParams, a_long: f64) -> Result<(f64, f64)> {
    let (f_zf, f_zr) = vertical_forces(p, a_long)?;
    Ok((
        cornering_stiffness(p.mu, p.c_sf, f_zf),
        cornering_stiffness(p.mu, p.c_sr, f_zr),
    ))
}

/// Dynamic single-track model with linear tires. Requires `v >= V_MIN_DST`.
pub fn dst_derivative(state: &VehicleState, u: &ControlInput, p: &VehicleParams) -> Result<StateDerivative> {
    let VehicleState {
        psi,
        psi_dot,
        v,
        beta,
        delta,
        ..
    } = *state;
    if v < V_MIN_DST {
        return Err(Error::SingularVelocity {
            velocity: v,
            minimum: V_MIN_DST,
        });
    }
    let (c_f, c_r) = dst_stiffness(p, u.a_long)?;
    let (l_f, l_r) = (p.l_f, p.l_r);
    let psi_ddot = (l_f * c_f * delta + (l_r * c_r - l_f * c_f) * beta
        - (l_f * l_f * c_f + l_r * l_r * c_r) * psi_dot / v)
        / p.i_z;
    let f_f = c_f * (delta - beta - l_f * psi_dot / v);
    let f_r = c_r * (-beta + l_r * psi_dot / v);
    Ok(StateDerivative {
        x_dot: v * (psi + beta).cos(),
        y_dot: v * (psi + beta).sin(),
        psi_dot,
        psi_ddot,
        v_dot: u.a_long,
        beta_dot: (f_f + f_r) / (p.m * v) - psi_dot,
        delta_dot: steering_rate(delta, u.delta_cmd),
        omega_f_dot: u.a_long / p.r_w,
        omega_r_dot: u.a_long / p.r_w,
    })
}

/// Tire state of the drift model: loads, slips and combined-slip forces.
pub fn std_tire_forces(state: &VehicleState, u: &ControlInput, p: &VehicleParams) -> Result<TireForces> {
    let VehicleState {
        psi_dot,
        v,
        beta,
        delta,
        omega_f,
        omega_r,
        ..
    } = *state;
    let (f_zf, f_zr) = vertical_forces(p, u.a_long)?;
    let (alpha_f, alpha_r) = slip_angles(v, beta, psi_dot, delta, p)?;
    let (u_wf, u_wr) = tire_contact_velocities(v, beta, psi_dot, delta, p);
    let s_f = longitudinal_slip(omega_f, u_wf, p.r_w)?;
    let s_r = longitudinal_slip(omega_r, u_wr, p.r_w)?;
    let c = &p.pacejka;
    let (f_xf, f_yf) = pacejka_combined(s_f, alpha_f, f_zf, p.mu, &c.longitudinal, &c.lateral_front);
    let (f_xr, f_yr) = pacejka_combined(s_r, alpha_r, f_zr, p.mu, &c.longitudinal, &c.lateral_rear);
    Ok(TireForces {
        f_xf,
        f_xr,
        f_yf,
        f_yr,
        f_zf,
        f_zr,
        alpha_f,
        alpha_r,
        s_f,
        s_r,
        u_wf,
        u_wr,
    })
}

/// Yaw acceleration of the drift model for given tire forces.
pub fn std_yaw_acceleration(f: &TireForces, delta: f64, p: &VehicleParams) -> f64 {
    (f.f_yf * delta.cos() * p.l_f - f.f_yr * p.l_r + f.f_xf * delta.sin() * p.l_f) / p.i_z
}

/// Drift-model dynamics for already computed tire forces: planar force
/// balance along and across the velocity vector, yaw moment and wheel spin.
pub fn std_derivative_with_forces(
    state: &VehicleState,
    u: &ControlInput,
    p: &VehicleParams,
    f: &TireForces,
) -> StateDerivative {
    let VehicleState {
        psi,
        psi_dot,
        v,
        beta,
        delta,
        ..
    } = *state;
    let (sin_db, cos_db) = (delta - beta).sin_cos();
    let (sin_b, cos_b) = beta.sin_cos();
    let along = f.f_xf * cos_db - f.f_yf * sin_db + f.f_xr * cos_b + f.f_yr * sin_b;
    let across = f.f_xf * sin_db + f.f_yf * cos_db - f.f_xr * sin_b + f.f_yr * cos_b;
    let (t_f, t_r) = u.axle_torques(p);
    StateDerivative {
        x_dot: v * (psi + beta).cos(),
        y_dot: v * (psi + beta).sin(),
        psi_dot,
        psi_ddot: std_yaw_acceleration(f, delta, p),
        v_dot: along / p.m,
        beta_dot: across / (p.m * v) - psi_dot,
        delta_dot: steering_rate(delta, u.delta_cmd),
        omega_f_dot: (t_f - p.r_w * f.f_xf) / p.i_w,
        omega_r_dot: (t_r - p.r_w * f.f_xr) / p.i_w,
    }
}

/// Single-track drift model. Requires `v >= EPS_V`; callers blend it with the
/// kinematic model at low speed (see [`model_derivative`]).
pub fn std_derivative(state: &VehicleState, u: &ControlInput, p: &VehicleParams) -> Result<StateDerivative> {
    if state.v < EPS_V {
        return Err(Error::SingularVelocity {
            velocity: state.v,
            minimum: EPS_V,
        });
    }
    let forces = std_tire_forces(state, u, p)?;
    Ok(std_derivative_with_forces(state, u, p, &forces))
}

/// Weight of the full model in the low-speed blend.
pub fn blend_weight(v: f64) -> f64 {
    ((v - BLEND_LOW) / (BLEND_HIGH - BLEND_LOW)).clamp(0.0, 1.0)
}

/// Linear blend between the kinematic and a full model over
/// `[BLEND_LOW, BLEND_HIGH]` m/s.
pub fn low_speed_blend(v: f64, kst_out: &StateDerivative, full_out: &StateDerivative) -> StateDerivative {
    let w = blend_weight(v);
    if w <= 0.0 {
        *kst_out
    } else if w >= 1.0 {
        *full_out
    } else {
        full_out.lerp(kst_out, w)
    }
}

/// Dynamics of `kind` including its low-speed handling: DST falls back to KST
/// below [`V_MIN_DST`], STD is blended with KST inside the blend window.
pub fn model_derivative(
    kind: ModelKind,
    state: &VehicleState,
    u: &ControlInput,
    p: &VehicleParams,
) -> Result<StateDerivative> {
    match kind {
        ModelKind::Kst => Ok(kst_derivative(state, u, p)),
        ModelKind::Dst if state.v < V_MIN_DST => Ok(kst_derivative(state, u, p)),
        ModelKind::Dst => dst_derivative(state, u, p),
        ModelKind::Std => {
            let w = blend_weight(state.v);
            if w <= 0.0 {
                Ok(kst_derivative(state, u, p))
            } else if w >= 1.0 {
                std_derivative(state, u, p)
            } else {
                let kin = kst_derivative(state, u, p);
                let full = std_derivative(state, u, p)?;
                Ok(low_speed_blend(state.v, &kin, &full))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn held(state: &VehicleState, a_long: f64) -> ControlInput {
        ControlInput::new(state.delta, a_long)
    }

    #[test]
    fn kst_yaw_rate_examples() {
        assert_eq!(kst_yaw_rate(10.0, 0.0, 2.5), 0.0);
        assert_relative_eq!(kst_yaw_rate(10.0, 0.1, 2.5), 0.4013386883418022, max_relative = 1e-14);
        assert_eq!(kst_yaw_rate(10.0, -0.1, 2.5), -kst_yaw_rate(10.0, 0.1, 2.5));
    }

    #[test]
    fn kst_straight_driving() {
        let p = VehicleParams::default();
        let s = VehicleState::rolling(15.0, p.r_w);
        let d = kst_derivative(&s, &held(&s, 0.0), &p);
        assert_eq!(d.psi_dot, 0.0);
        assert_eq!(d.psi_ddot, 0.0);
        assert_eq!(d.x_dot, 15.0);
    }

    #[test]
    fn kst_yaw_acceleration_under_throttle() {
        let p = VehicleParams {
            l_f: 1.2,
            l_r: 1.3,
            l_wb: 2.5,
            ..VehicleParams::default()
        };
        let s = VehicleState {
            v: 10.0,
            delta: 0.1,
            ..VehicleState::default()
        };
        let d = kst_derivative(&s, &held(&s, 1.0), &p);
        assert_relative_eq!(d.psi_ddot, 0.04013386883418022, max_relative = 1e-14);
    }

    #[test]
    fn dst_zero_inputs() {
        let p = VehicleParams::default();
        let s = VehicleState::rolling(20.0, p.r_w);
        let d = dst_derivative(&s, &held(&s, 0.0), &p).unwrap();
        assert_eq!(d.psi_ddot, 0.0);
        assert_eq!(d.beta_dot, 0.0);
    }

    #[test]
    fn dst_symmetric_vehicle() {
        // l_f = l_r and equal specific stiffness give C_f = C_r at a_long = 0.
        let p = VehicleParams {
            l_f: 1.25,
            l_r: 1.25,
            l_wb: 2.5,
            ..VehicleParams::default()
        };
        let s = VehicleState {
            v: 15.0,
            delta: 0.05,
            ..VehicleState::default()
        };
        let d = dst_derivative(&s, &held(&s, 0.0), &p).unwrap();
        let (f_zf, _) = vertical_forces(&p, 0.0).unwrap();
        let c_f = cornering_stiffness(p.mu, p.c_sf, f_zf);
        assert_relative_eq!(d.psi_ddot, p.l_f * c_f * 0.05 / p.i_z, max_relative = 1e-12);
    }

    #[test]
    fn dst_rejects_low_speed() {
        let p = VehicleParams::default();
        let s = VehicleState::rolling(0.05, p.r_w);
        assert!(matches!(
            dst_derivative(&s, &held(&s, 0.0), &p),
            Err(Error::SingularVelocity { .. })
        ));
        // the switched model falls back to KST instead
        let d = model_derivative(ModelKind::Dst, &s, &held(&s, 0.0), &p).unwrap();
        assert_eq!(d, kst_derivative(&s, &held(&s, 0.0), &p));
    }

    #[test]
    fn std_force_free_rolling() {
        let p = VehicleParams::default();
        let s = VehicleState::rolling(20.0, p.r_w);
        let d = std_derivative(&s, &held(&s, 0.0), &p).unwrap();
        assert_eq!(d.psi_ddot, 0.0);
        assert_eq!(d.omega_f_dot, 0.0);
        assert_eq!(d.omega_r_dot, 0.0);
        assert_eq!(d.v_dot, 0.0);
    }

    #[test]
    fn std_yaw_moment_for_injected_forces() {
        let p = VehicleParams::default();
        for (fyf, fyr, fxf, delta) in [
            (3000.0, 2500.0, -400.0, 0.08),
            (-1200.0, 800.0, 1500.0, -0.2),
            (0.0, 4000.0, 0.0, 0.3),
        ] {
            let f = TireForces {
                f_yf: fyf,
                f_yr: fyr,
                f_xf: fxf,
                ..TireForces::default()
            };
            let expected = fyf * f64::cos(delta) * p.l_f - fyr * p.l_r + fxf * f64::sin(delta) * p.l_f;
            assert_relative_eq!(
                std_yaw_acceleration(&f, delta, &p) * p.i_z,
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn std_friction_scales_yaw_acceleration() {
        let p = VehicleParams::default();
        let s = VehicleState {
            delta: 0.1,
            ..VehicleState::rolling(20.0, p.r_w)
        };
        let dry = std_derivative(&s, &held(&s, 0.0), &p).unwrap();
        let icy = std_derivative(&s, &held(&s, 0.0), &p.with_mu(0.2)).unwrap();
        assert!(icy.psi_ddot.abs() < dry.psi_ddot.abs());
        assert!(icy.psi_ddot > 0.0);
    }

    #[test]
    fn blend_endpoints_and_midpoint() {
        let a = StateDerivative::from_array([1.0; 9]);
        let b = StateDerivative::from_array([3.0; 9]);
        assert_eq!(low_speed_blend(0.1, &a, &b), a);
        assert_eq!(low_speed_blend(0.0, &a, &b), a);
        assert_eq!(low_speed_blend(1.0, &a, &b), b);
        assert_eq!(low_speed_blend(5.0, &a, &b), b);
        let mid = low_speed_blend(0.55, &a, &b);
        for v in mid.to_array() {
            assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn model_kind_parsing() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.as_str().parse::<ModelKind>().unwrap(), kind);
        }
        assert!("pointmass".parse::<ModelKind>().is_err());
    }
}
