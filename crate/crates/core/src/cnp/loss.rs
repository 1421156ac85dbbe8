//! Gaussian negative log-likelihood.

use std::f64::consts::TAU;

use super::model::GaussianPrediction;
use crate::error::{Error, Result};

/// NLL of a single point.
pub fn point_nll(mu: f64, sigma2: f64, y: f64) -> f64 {
    let r = y - mu;
    0.5 * (TAU * sigma2).ln() + r * r / (2.0 * sigma2)
}

/// Mean negative log-likelihood of `y` under the factorized predictions.
pub fn gaussian_nll(preds: &[GaussianPrediction], y: &[f64]) -> Result<f64> {
    if preds.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: y.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptySet);
    }
    let total: f64 = preds.iter().zip(y).map(|(p, &y)| point_nll(p.mu, p.sigma2, y)).sum();
    Ok(total / preds.len() as f64)
}
