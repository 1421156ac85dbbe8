//! Dense multilayer perceptron with ReLU hidden layers and a linear output.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `inputs x outputs`, so that a batch `X` maps to `X W + b`.
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            w: Array2::zeros((inputs, outputs)),
            b: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.w.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.w.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

/// Layer inputs recorded during a batched forward pass: `inputs[l]` is what
/// layer `l` received (post-ReLU for `l > 0`).
#[derive(Debug, Clone)]
pub struct MlpCache {
    inputs: Vec<Array2<f64>>,
}

impl Mlp {
    /// Zero-initialized network with the given layer widths, input first.
    pub fn zeros(widths: &[usize]) -> Self {
        assert!(widths.len() >= 2, "an MLP needs at least an input and an output width");
        Self {
            layers: widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        }
    }

    /// Random initialization: He-uniform on ReLU layers, Glorot-uniform on the
    /// linear output layer, zero biases.
    pub fn init<R: Rng>(widths: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(widths);
        let last = net.layers.len() - 1;
        for (l, layer) in net.layers.iter_mut().enumerate() {
            let (fan_in, fan_out) = (layer.inputs() as f64, layer.outputs() as f64);
            let limit = if l == last {
                (6.0 / (fan_in + fan_out)).sqrt()
            } else {
                (6.0 / fan_in).sqrt()
            };
            layer.w.mapv_inplace(|_| rng.random_range(-limit..limit));
        }
        net
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Layer widths, input first.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_dim()];
        w.extend(self.layers.iter().map(Layer::outputs));
        w
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidArgument("MLP without layers".into()));
        }
        for pair in self.layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].outputs(),
                    actual: pair[1].inputs(),
                });
            }
        }
        for layer in &self.layers {
            if layer.b.len() != layer.outputs() {
                return Err(Error::DimensionMismatch {
                    expected: layer.outputs(),
                    actual: layer.b.len(),
                });
            }
            if !layer.w.iter().chain(layer.b.iter()).all(|v| v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite MLP weight".into()));
            }
        }
        Ok(())
    }

    /// Forward pass of a single input vector.
    pub fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        let batch = x.insert_axis(Axis(0));
        Ok(self.forward_batch(batch)?.row(0).to_owned())
    }

    /// Forward pass of a batch, one sample per row.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(x.ncols())?;
        let mut a = x.to_owned();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            a = affine(&a, layer);
            if l < last {
                a.mapv_inplace(relu);
            }
        }
        Ok(a)
    }

    /// Forward pass that keeps what the backward pass needs.
    pub fn forward_cached(&self, x: Array2<f64>) -> Result<(Array2<f64>, MlpCache)> {
        self.check_input(x.ncols())?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut a = x;
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = affine(&a, layer);
            if l < last {
                z.mapv_inplace(relu);
            }
            inputs.push(a);
            a = z;
        }
        Ok((a, MlpCache { inputs }))
    }

    /// Reverse pass: accumulates parameter gradients into `grads` and returns
    /// the gradient with respect to the network input.
    pub fn backward(&self, cache: &MlpCache, d_out: Array2<f64>, grads: &mut Mlp) -> Array2<f64> {
        let mut dz = d_out;
        for l in (0..self.layers.len()).rev() {
            let input = &cache.inputs[l];
            let g = &mut grads.layers[l];
            ndarray::linalg::general_mat_mul(1.0, &input.t(), &dz, 1.0, &mut g.w);
            g.b += &dz.sum_axis(Axis(0));
            let mut d_in = dz.dot(&self.layers[l].w.t());
            if l > 0 {
                // input[l] = relu(z[l-1]); the ReLU passes gradient where it was active
                ndarray::Zip::from(&mut d_in).and(input).for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
            }
            dz = d_in;
        }
        dz
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Parameter storage as contiguous slices, in a fixed order.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            out.push(l.w.as_slice().expect("weights are contiguous"));
            out.push(l.b.as_slice().expect("biases are contiguous"));
        }
        out
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push(l.w.as_slice_mut().expect("weights are contiguous"));
            out.push(l.b.as_slice_mut().expect("biases are contiguous"));
        }
        out
    }

    /// A zero network of the same shape, used as gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::zeros(l.inputs(), l.outputs()))
                .collect(),
        }
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: cols,
            });
        }
        Ok(())
    }
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

fn affine(x: &Array2<f64>, layer: &Layer) -> Array2<f64> {
    let mut z = x.dot(&layer.w);
    z += &layer.b;
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Plain-loop forward pass.
    fn oracle(net: &Mlp, x: &[f64]) -> Vec<f64> {
        let mut a = x.to_vec();
        for (l, layer) in net.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.outputs()];
            for (j, zj) in z.iter_mut().enumerate() {
                let mut acc = layer.b[j];
                for (i, ai) in a.iter().enumerate() {
                    acc += ai * layer.w[[i, j]];
                }
                *zj = if l + 1 < net.layers.len() { acc.max(0.0) } else { acc };
            }
            a = z;
        }
        a
    }

    #[test]
    fn zero_weights_give_final_bias() {
        let mut net = Mlp::zeros(&[3, 5, 2]);
        net.layers[1].b = array![0.7, -1.5];
        let y = net.forward(array![1.0, 2.0, 3.0].view()).unwrap();
        assert_eq!(y, array![0.7, -1.5]);
    }

    #[test]
    fn identity_layer_passes_positive_input() {
        let mut net = Mlp::zeros(&[3, 3]);
        net.layers[0].w = Array::eye(3);
        let x = array![0.5, 1.0, 2.5];
        assert_eq!(net.forward(x.view()).unwrap(), x);
    }

    #[test]
    fn forward_matches_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::init(&[4, 16, 16, 3], &mut rng);
        let x = Array2::from_shape_fn((20, 4), |_| rng.random_range(-2.0..2.0));
        let y = net.forward_batch(x.view()).unwrap();
        for r in 0..20 {
            let expected = oracle(&net, x.row(r).as_slice().unwrap());
            for (a, b) in y.row(r).iter().zip(&expected) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let net = Mlp::zeros(&[3, 2]);
        assert!(matches!(
            net.forward(array![1.0, 2.0].view()),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn validate_detects_broken_chain() {
        let mut net = Mlp::zeros(&[3, 4, 2]);
        net.validate().unwrap();
        net.layers[1] = Layer::zeros(5, 2);
        assert!(net.validate().is_err());
        let mut net = Mlp::zeros(&[3, 2]);
        net.layers[0].w[[0, 0]] = f64::NAN;
        assert!(net.validate().is_err());
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = Mlp::init(&[3, 6, 5, 2], &mut rng);
        let x = Array2::from_shape_fn((4, 3), |_| rng.random_range(-1.0..1.0));
        let weights = array![0.3, -1.2];
        // loss = sum over rows of weights . output
        let loss = |n: &Mlp| n.forward_batch(x.view()).unwrap().dot(&weights).sum();
        let (out, cache) = net.forward_cached(x.clone()).unwrap();
        let d_out = Array2::from_shape_fn(out.raw_dim(), |(_, j)| weights[j]);
        let mut grads = net.zeros_like();
        net.backward(&cache, d_out, &mut grads);

        let h = 1e-6;
        let mut probe = net.clone();
        let analytic: Vec<f64> = grads.param_slices().concat();
        let mut k = 0;
        for s in 0..probe.param_slices().len() {
            for i in 0..probe.param_slices()[s].len() {
                let orig = probe.param_slices()[s][i];
                probe.param_slices_mut()[s][i] = orig + h;
                let up = loss(&probe);
                probe.param_slices_mut()[s][i] = orig - h;
                let down = loss(&probe);
                probe.param_slices_mut()[s][i] = orig;
                let fd = (up - down) / (2.0 * h);
                assert!((fd - analytic[k]).abs() < 1e-6, "param {k}: {fd} vs {}", analytic[k]);
                k += 1;
            }
        }
        assert_eq!(k, net.num_params());
    }
}
