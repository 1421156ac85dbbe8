//! Single-track vehicle models: kinematic (KST), dynamic (DST) and drift (STD).

mod models;
mod params;
mod state;
mod tire;

pub use models::{
    blend_weight, dst_axle_forces, dst_derivative, kst_derivative, kst_yaw_rate, low_speed_blend,
    model_derivative, std_derivative, std_derivative_with_forces, std_tire_forces,
    std_yaw_acceleration, ModelKind, BLEND_HIGH, BLEND_LOW, V_MIN_DST,
};
pub use params::{MagicFormula, PacejkaCoeffs, VehicleParams, BUNDLED, G};
pub use state::{
    steering_rate, ControlInput, StateDerivative, VehicleState, MAX_STEER_RATE, STATE_DIM,
    STEER_TIME_CONSTANT,
};
pub use tire::{
    cornering_stiffness, longitudinal_slip, magic_formula, pacejka_combined, slip_angles,
    tire_contact_velocities, vertical_forces, TireForces, EPS_V, SLIP_LIMIT,
};
