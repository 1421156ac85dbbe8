//! Conditional neural process for yaw-rate regression, implemented on dense
//! matrix products with a hand-written reverse pass.

mod adam;
mod backward;
mod checkpoint;
mod loss;
mod mlp;
mod model;

pub use adam::{Adam, BETA1, BETA2, EPSILON};
pub use backward::{backward, Gradients};
pub use checkpoint::{Checkpoint, FORMAT_VERSION};
pub use loss::{gaussian_nll, point_nll};
pub use mlp::{Layer, Mlp, MlpCache};
pub use model::{
    aggregate, aggregate_rows, CnpConfig, CnpModel, GaussianPrediction, NormStats, D_X, D_Y,
    SIGMA2_FLOOR,
};
