//! Conditional neural process: feature encoder, context encoder, mean
//! aggregation and Gaussian decoder.

use std::cmp::Ordering;

use ndarray::{concatenate, s, Array1, Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::{Mlp, MlpCache};
use crate::error::{Error, Result};

/// Input dimension: steering angle, speed and longitudinal acceleration.
pub const D_X: usize = 3;
/// Output dimension: yaw rate.
pub const D_Y: usize = 1;
/// Lower bound of every predicted variance [(rad/s)^2].
pub const SIGMA2_FLOOR: f64 = 1e-6;

/// Layer widths of the three networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnpConfig {
    pub feature_hidden: Vec<usize>,
    /// Width of the feature encoding of one input.
    pub feature_dim: usize,
    pub context_hidden: Vec<usize>,
    /// Embedding size `d_e`.
    pub d_e: usize,
    pub decoder_hidden: Vec<usize>,
}

impl Default for CnpConfig {
    fn default() -> Self {
        Self {
            feature_hidden: vec![64],
            feature_dim: 64,
            context_hidden: vec![128, 128],
            d_e: 64,
            decoder_hidden: vec![64; 4],
        }
    }
}

impl CnpConfig {
    /// A tiny network for gradient checks and fast tests.
    pub fn miniature() -> Self {
        Self {
            feature_hidden: vec![5],
            feature_dim: 4,
            context_hidden: vec![6, 6],
            d_e: 4,
            decoder_hidden: vec![5, 5],
        }
    }

    fn feature_widths(&self) -> Vec<usize> {
        chain(D_X, &self.feature_hidden, self.feature_dim)
    }

    fn context_widths(&self) -> Vec<usize> {
        chain(self.feature_dim + D_Y, &self.context_hidden, self.d_e)
    }

    fn decoder_widths(&self) -> Vec<usize> {
        chain(self.feature_dim + self.d_e, &self.decoder_hidden, 2)
    }
}

fn chain(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut w = vec![input];
    w.extend_from_slice(hidden);
    w.push(output);
    w
}

/// Per-channel z-score statistics of `(delta, v, a_long, psi_dot)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

impl Default for NormStats {
    fn default() -> Self {
        Self {
            mean: [0.0; 4],
            std: [1.0; 4],
        }
    }
}

impl NormStats {
    /// Statistics over all rows of the given channels; a zero spread is
    /// replaced by 1.
    pub fn from_channels(delta: &[f64], v: &[f64], a_long: &[f64], psi_dot: &[f64]) -> Result<Self> {
        let mut stats = Self::default();
        for (c, data) in [delta, v, a_long, psi_dot].into_iter().enumerate() {
            if data.is_empty() {
                return Err(Error::EmptySet);
            }
            let n = data.len() as f64;
            let mean = data.iter().sum::<f64>() / n;
            let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            stats.mean[c] = mean;
            stats.std[c] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if self.std.iter().all(|s| s.is_finite() && *s > 0.0) && self.mean.iter().all(|m| m.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid normalization statistics {self:?}")))
        }
    }

    fn normalize_x(&self, x: &[f64; D_X]) -> [f64; D_X] {
        std::array::from_fn(|c| (x[c] - self.mean[c]) / self.std[c])
    }

    fn normalize_y(&self, y: f64) -> f64 {
        (y - self.mean[3]) / self.std[3]
    }
}

/// Predictive distribution of the yaw rate at one target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrediction {
    pub mu: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnpModel {
    pub feature_encoder: Mlp,
    pub context_encoder: Mlp,
    pub decoder: Mlp,
    pub d_e: usize,
    pub norm: NormStats,
}

/// Context pairs sorted into canonical order, so that every downstream
/// computation is independent of the order in which they were supplied.
pub(crate) fn canonical_context(xs: &[[f64; D_X]], ys: &[f64]) -> Vec<([f64; D_X], f64)> {
    let mut pairs: Vec<([f64; D_X], f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(a.1.total_cmp(&b.1))
    });
    pairs
}

pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Intermediate values of one task's forward pass.
pub(crate) struct ForwardTrace {
    pub n_context: usize,
    pub feature_cache: MlpCache,
    pub context_cache: MlpCache,
    pub decoder_cache: MlpCache,
    /// Raw decoder output, `M x 2`.
    pub raw: Array2<f64>,
}

impl CnpModel {
    pub fn new(config: &CnpConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            feature_encoder: Mlp::init(&config.feature_widths(), &mut rng),
            context_encoder: Mlp::init(&config.context_widths(), &mut rng),
            decoder: Mlp::init(&config.decoder_widths(), &mut rng),
            d_e: config.d_e,
            norm: NormStats::default(),
        }
    }

    pub fn config(&self) -> CnpConfig {
        let hidden = |net: &Mlp| {
            let w = net.widths();
            w[1..w.len() - 1].to_vec()
        };
        CnpConfig {
            feature_hidden: hidden(&self.feature_encoder),
            feature_dim: self.feature_encoder.output_dim(),
            context_hidden: hidden(&self.context_encoder),
            d_e: self.d_e,
            decoder_hidden: hidden(&self.decoder),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.feature_encoder.validate()?;
        self.context_encoder.validate()?;
        self.decoder.validate()?;
        self.norm.validate()?;
        let f = self.feature_encoder.output_dim();
        let expect = |expected: usize, actual: usize| {
            if expected == actual {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, actual })
            }
        };
        expect(D_X, self.feature_encoder.input_dim())?;
        expect(f + D_Y, self.context_encoder.input_dim())?;
        expect(self.d_e, self.context_encoder.output_dim())?;
        expect(f + self.d_e, self.decoder.input_dim())?;
        expect(2, self.decoder.output_dim())
    }

    pub fn num_params(&self) -> usize {
        self.feature_encoder.num_params() + self.context_encoder.num_params() + self.decoder.num_params()
    }

    /// Embeds every context pair: `context_encoder([feature_encoder(x), y])`.
    /// Rows follow the order of the input.
    pub fn encode_context(&self, xs: &[[f64; D_X]], ys: &[f64]) -> Result<Array2<f64>> {
        check_context(xs, ys)?;
        let features = self.feature_encoder.forward_batch(self.normalized_inputs(xs).view())?;
        let y = Array2::from_shape_fn((ys.len(), 1), |(i, _)| self.norm.normalize_y(ys[i]));
        let input = concatenate![Axis(1), features, y];
        self.context_encoder.forward_batch(input.view())
    }

    /// Decodes one target input against an aggregated embedding.
    pub fn decode(&self, x: &[f64; D_X], e: ArrayView1<f64>) -> Result<GaussianPrediction> {
        if e.len() != self.d_e {
            return Err(Error::DimensionMismatch {
                expected: self.d_e,
                actual: e.len(),
            });
        }
        let features = self.feature_encoder.forward(Array1::from(self.norm.normalize_x(x).to_vec()).view())?;
        let input = concatenate![Axis(0), features, e];
        let raw = self.decoder.forward(input.view())?;
        Ok(self.head(raw[0], raw[1]))
    }

    /// Conditional predictive distribution of every target given the context.
    /// The context is put into canonical order first, which makes the result
    /// bit-identical under any permutation of the context.
    pub fn predict(
        &self,
        xs: &[[f64; D_X]],
        ys: &[f64],
        targets: &[[f64; D_X]],
    ) -> Result<Vec<GaussianPrediction>> {
        check_context(xs, ys)?;
        if targets.is_empty() {
            return Ok(Vec::new());
        }
        let trace = self.forward_trace(xs, ys, targets)?;
        Ok(trace.raw.rows().into_iter().map(|r| self.head(r[0], r[1])).collect())
    }

    /// Real-unit prediction from the two raw decoder outputs.
    pub(crate) fn head(&self, raw_mu: f64, raw_sigma: f64) -> GaussianPrediction {
        let s = self.norm.std[3];
        GaussianPrediction {
            mu: raw_mu * s + self.norm.mean[3],
            sigma2: SIGMA2_FLOOR + softplus(raw_sigma) * s * s,
        }
    }

    fn normalized_inputs(&self, xs: &[[f64; D_X]]) -> Array2<f64> {
        let mut out = Array2::zeros((xs.len(), D_X));
        for (mut row, x) in out.rows_mut().into_iter().zip(xs) {
            row.assign(&ArrayView1::from(&self.norm.normalize_x(x)));
        }
        out
    }

    /// Full forward pass of one task, keeping the caches for backward. The
    /// context is canonicalized here.
    pub(crate) fn forward_trace(
        &self,
        xs: &[[f64; D_X]],
        ys: &[f64],
        targets: &[[f64; D_X]],
    ) -> Result<ForwardTrace> {
        check_context(xs, ys)?;
        let context = canonical_context(xs, ys);
        let (n, m) = (context.len(), targets.len());

        // one feature pass over context rows followed by target rows
        let mut stacked: Vec<[f64; D_X]> = context.iter().map(|(x, _)| *x).collect();
        stacked.extend_from_slice(targets);
        let (features, feature_cache) = self.feature_encoder.forward_cached(self.normalized_inputs(&stacked))?;

        let y = Array2::from_shape_fn((n, 1), |(i, _)| self.norm.normalize_y(context[i].1));
        let context_in = concatenate![Axis(1), features.slice(s![..n, ..]), y];
        let (embeddings, context_cache) = self.context_encoder.forward_cached(context_in)?;
        let e = aggregate_rows(&embeddings)?;

        let mut decoder_in = Array2::zeros((m, features.ncols() + self.d_e));
        decoder_in.slice_mut(s![.., ..features.ncols()]).assign(&features.slice(s![n.., ..]));
        decoder_in.slice_mut(s![.., features.ncols()..]).assign(&e);
        let (raw, decoder_cache) = self.decoder.forward_cached(decoder_in)?;
        Ok(ForwardTrace {
            n_context: n,
            feature_cache,
            context_cache,
            decoder_cache,
            raw,
        })
    }
}

fn check_context(xs: &[[f64; D_X]], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::EmptyContext);
    }
    Ok(())
}

/// Elementwise mean of the rows, summed top to bottom.
pub fn aggregate_rows(embeddings: &Array2<f64>) -> Result<Array1<f64>> {
    let n = embeddings.nrows();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut sum = Array1::zeros(embeddings.ncols());
    for row in embeddings.rows() {
        sum += &row;
    }
    Ok(sum / n as f64)
}

/// Mean of a set of embeddings. The set is put into canonical (lexicographic)
/// order before summation, so the result does not depend on the input order.
pub fn aggregate(embeddings: &[Array1<f64>]) -> Result<Array1<f64>> {
    let first = embeddings.first().ok_or(Error::EmptySet)?;
    let d = first.len();
    if let Some(bad) = embeddings.iter().find(|e| e.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: bad.len(),
        });
    }
    let mut sorted: Vec<&Array1<f64>> = embeddings.iter().collect();
    sorted.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    let mut sum = Array1::zeros(d);
    for e in sorted {
        sum += e;
    }
    Ok(sum / embeddings.len() as f64)
}
