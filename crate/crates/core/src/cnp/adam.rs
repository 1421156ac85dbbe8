//! Adaptive-moment optimizer.

use super::backward::Gradients;
use super::model::CnpModel;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    /// Number of steps taken so far.
    pub t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, num_params: usize) -> Self {
        Self {
            lr,
            t: 0,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
        }
    }

    /// One bias-corrected update of every parameter slice against the
    /// matching gradient slice.
    pub fn step_slices<'a>(
        &mut self,
        params: impl IntoIterator<Item = &'a mut [f64]>,
        grads: impl IntoIterator<Item = &'a [f64]>,
    ) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t as i32);
        let c2 = 1.0 - BETA2.powi(self.t as i32);
        let mut k = 0;
        for (p, g) in params.into_iter().zip(grads) {
            assert_eq!(p.len(), g.len(), "parameter and gradient shapes differ");
            for (x, &gi) in p.iter_mut().zip(g) {
                let m = &mut self.m[k];
                let v = &mut self.v[k];
                *m = BETA1 * *m + (1.0 - BETA1) * gi;
                *v = BETA2 * *v + (1.0 - BETA2) * gi * gi;
                *x -= self.lr * (*m / c1) / ((*v / c2).sqrt() + EPSILON);
                k += 1;
            }
        }
        assert_eq!(k, self.m.len(), "optimizer state does not match the model");
    }

    pub fn step(&mut self, model: &mut CnpModel, grads: &Gradients) {
        self.step_slices(model.param_slices_mut(), grads.param_slices());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnp::model::CnpConfig;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut model = CnpModel::new(&CnpConfig::miniature(), 1);
        let before = model.clone();
        let mut adam = Adam::new(1e-3, model.num_params());
        let zero = Gradients::zeros_like(&model);
        for _ in 0..5 {
            adam.step(&mut model, &zero);
        }
        assert_eq!(model, before);
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let mut p = [1.0, -2.0, 0.5];
        let g = [0.3, -4.0, 1e-3];
        let mut adam = Adam::new(1e-3, 3);
        adam.step_slices([&mut p[..]], [&g[..]]);
        for ((after, before), gi) in p.iter().zip([1.0, -2.0, 0.5]).zip(g) {
            let moved = after - before;
            assert!((moved + 1e-3 * gi.signum()).abs() < 1e-7, "{moved}");
        }
    }

    #[test]
    fn minimizes_scalar_quadratic() {
        // f(x) = (x - 3)^2
        let mut x = [0.0];
        let mut adam = Adam::new(0.1, 1);
        for _ in 0..200 {
            let g = [2.0 * (x[0] - 3.0)];
            adam.step_slices([&mut x[..]], [&g[..]]);
        }
        assert!((x[0] - 3.0).abs() < 1e-3, "{}", x[0]);
    }
}
