//! Axle loads, slip quantities and the magic-formula tire.

use super::{MagicFormula, VehicleParams};
use crate::error::{Error, Result};

/// Velocity below which slip quantities are singular [m/s].
pub const EPS_V: f64 = 1e-3;
/// Longitudinal slip is clamped to `[-SLIP_LIMIT, SLIP_LIMIT]`.
pub const SLIP_LIMIT: f64 = 1.5;

/// Everything the drift model computes at the contact patches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TireForces {
    pub f_xf: f64,
    pub f_xr: f64,
    pub f_yf: f64,
    pub f_yr: f64,
    pub f_zf: f64,
    pub f_zr: f64,
    pub alpha_f: f64,
    pub alpha_r: f64,
    pub s_f: f64,
    pub s_r: f64,
    pub u_wf: f64,
    pub u_wr: f64,
}

/// Static axle loads plus longitudinal load transfer, `(F_zf, F_zr)`.
pub fn vertical_forces(p: &VehicleParams, a_long: f64) -> Result<(f64, f64)> {
    let l = p.l_r + p.l_f;
    let f_zf = p.m * (p.g * p.l_r - a_long * p.h_cg) / l;
    let f_zr = p.m * (p.g * p.l_f + a_long * p.h_cg) / l;
    if f_zf <= 0.0 || f_zr <= 0.0 {
        return Err(Error::InvalidRegime(format!(
            "axle unloaded at a_long = {a_long} m/s^2 (F_zf = {f_zf}, F_zr = {f_zr})"
        )));
    }
    Ok((f_zf, f_zr))
}

/// Linear cornering stiffness of one axle [N/rad].
pub fn cornering_stiffness(mu: f64, c_s: f64, f_z: f64) -> f64 {
    mu * c_s * f_z
}

/// Lateral slip angles `(alpha_f, alpha_r)` of the front and rear axle.
pub fn slip_angles(
    v: f64,
    beta: f64,
    psi_dot: f64,
    delta: f64,
    p: &VehicleParams,
) -> Result<(f64, f64)> {
    let v_long = v * beta.cos();
    if v_long <= EPS_V {
        return Err(Error::SingularVelocity {
            velocity: v_long,
            minimum: EPS_V,
        });
    }
    let v_lat = v * beta.sin();
    let alpha_f = ((v_lat + psi_dot * p.l_f) / v_long).atan() - delta;
    let alpha_r = ((v_lat - psi_dot * p.l_r) / v_long).atan();
    Ok((alpha_f, alpha_r))
}

/// Longitudinal slip `1 - R_w * omega / u_w`, clamped to +-[`SLIP_LIMIT`].
/// Positive slip means the wheel turns slower than the road (braking).
pub fn longitudinal_slip(omega: f64, u_w: f64, r_w: f64) -> Result<f64> {
    if u_w <= EPS_V {
        return Err(Error::SingularVelocity {
            velocity: u_w,
            minimum: EPS_V,
        });
    }
    Ok((1.0 - r_w * omega / u_w).clamp(-SLIP_LIMIT, SLIP_LIMIT))
}

/// Contact-patch velocities along the wheel planes, `(u_wf, u_wr)`.
pub fn tire_contact_velocities(
    v: f64,
    beta: f64,
    psi_dot: f64,
    delta: f64,
    p: &VehicleParams,
) -> (f64, f64) {
    let u_wf = v * beta.cos() * delta.cos() + (v * beta.sin() + p.l_f * psi_dot) * delta.sin();
    let u_wr = v * beta.cos();
    (u_wf, u_wr)
}

/// Pure-slip magic formula `D sin(C atan(B k - E (B k - atan(B k))))`.
pub fn magic_formula(k: f64, peak: f64, mf: &MagicFormula) -> f64 {
    let bk = mf.b * k;
    peak * (mf.c * (bk - mf.e * (bk - bk.atan())).atan()).sin()
}

/// Combined-slip axle forces `(F_x, F_y)`.
///
/// Each channel uses the pure-slip curve with peak `mu * F_z`; the force
/// vector is then scaled back onto the friction ellipse whenever the two
/// channels together demand more than the available grip. A braking slip
/// (`s > 0`) gives a negative `F_x`, a negative slip angle a positive `F_y`.
pub fn pacejka_combined(
    s: f64,
    alpha: f64,
    f_z: f64,
    mu: f64,
    longitudinal: &MagicFormula,
    lateral: &MagicFormula,
) -> (f64, f64) {
    let peak = mu * f_z;
    let fx = magic_formula(-s, peak, longitudinal);
    let fy = magic_formula(-alpha, peak, lateral);
    let norm = fx.hypot(fy);
    if norm > peak && norm > 0.0 {
        let scale = peak / norm;
        (fx * scale, fy * scale)
    } else {
        (fx, fy)
    }
}
