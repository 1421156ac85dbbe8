//! Reverse-mode gradients of the task NLL with respect to every parameter.

use ndarray::{s, Array2, Axis};

use super::mlp::Mlp;
use super::model::{sigmoid, softplus, CnpModel, D_X, SIGMA2_FLOOR};
use super::loss::point_nll;
use crate::error::{Error, Result};

/// Parameter-shaped gradient storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub feature_encoder: Mlp,
    pub context_encoder: Mlp,
    pub decoder: Mlp,
}

impl Gradients {
    pub fn zeros_like(model: &CnpModel) -> Self {
        Self {
            feature_encoder: model.feature_encoder.zeros_like(),
            context_encoder: model.context_encoder.zeros_like(),
            decoder: model.decoder.zeros_like(),
        }
    }

    /// Slices in the same order as [`CnpModel::param_slices`].
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = self.feature_encoder.param_slices();
        out.extend(self.context_encoder.param_slices());
        out.extend(self.decoder.param_slices());
        out
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = self.feature_encoder.param_slices_mut();
        out.extend(self.context_encoder.param_slices_mut());
        out.extend(self.decoder.param_slices_mut());
        out
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.param_slices_mut().into_iter().zip(other.param_slices()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in self.param_slices_mut() {
            for x in a.iter_mut() {
                *x *= factor;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.param_slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    /// Euclidean norm over all entries.
    pub fn norm(&self) -> f64 {
        self.param_slices()
            .iter()
            .flat_map(|s| s.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

impl CnpModel {
    /// Parameter storage as contiguous slices: feature encoder, context
    /// encoder, decoder; weights before biases within each layer.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = self.feature_encoder.param_slices();
        out.extend(self.context_encoder.param_slices());
        out.extend(self.decoder.param_slices());
        out
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = self.feature_encoder.param_slices_mut();
        out.extend(self.context_encoder.param_slices_mut());
        out.extend(self.decoder.param_slices_mut());
        out
    }
}

/// Mean NLL of `y` at `targets` given the context, and its exact gradient.
pub fn backward(
    model: &CnpModel,
    xs: &[[f64; D_X]],
    ys: &[f64],
    targets: &[[f64; D_X]],
    y: &[f64],
) -> Result<(f64, Gradients)> {
    if targets.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: targets.len(),
            right: y.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::EmptySet);
    }
    let trace = model.forward_trace(xs, ys, targets)?;
    let m = targets.len();
    let n = trace.n_context;
    let s_y = model.norm.std[3];
    let mean_y = model.norm.mean[3];

    // loss head
    let mut loss = 0.0;
    let mut d_raw = Array2::zeros((m, 2));
    for (i, raw) in trace.raw.rows().into_iter().enumerate() {
        let mu = raw[0] * s_y + mean_y;
        let sigma2 = SIGMA2_FLOOR + softplus(raw[1]) * s_y * s_y;
        let r = y[i] - mu;
        loss += point_nll(mu, sigma2, y[i]);
        let d_mu = -r / sigma2;
        let d_sigma2 = 0.5 / sigma2 - r * r / (2.0 * sigma2 * sigma2);
        d_raw[[i, 0]] = d_mu * s_y / m as f64;
        d_raw[[i, 1]] = d_sigma2 * s_y * s_y * sigmoid(raw[1]) / m as f64;
    }
    loss /= m as f64;

    let mut grads = Gradients::zeros_like(model);
    let f = model.feature_encoder.output_dim();

    let d_decoder_in = model.decoder.backward(&trace.decoder_cache, d_raw, &mut grads.decoder);
    let d_e = d_decoder_in.slice(s![.., f..]).sum_axis(Axis(0)) / n as f64;
    // every context embedding receives 1/N of the aggregate's gradient
    let d_embeddings = d_e.broadcast((n, model.d_e)).expect("broadcast to context rows").to_owned();
    let d_context_in = model
        .context_encoder
        .backward(&trace.context_cache, d_embeddings, &mut grads.context_encoder);

    let mut d_features = Array2::zeros((n + m, f));
    d_features.slice_mut(s![..n, ..]).assign(&d_context_in.slice(s![.., ..f]));
    d_features.slice_mut(s![n.., ..]).assign(&d_decoder_in.slice(s![.., ..f]));
    model
        .feature_encoder
        .backward(&trace.feature_cache, d_features, &mut grads.feature_encoder);
    Ok((loss, grads))
}
