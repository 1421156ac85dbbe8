//! Yaw-rate prediction with single-track vehicle models and conditional
//! neural processes.
//!
//! The crate is organized bottom-up:
//!
//! - [`vehicle`]: KST, DST and STD dynamics, tire model and parameter sets.
//! - [`sim`]: driving scenarios, integrators and time-series recording.
//! - [`cnp`]: the conditional neural process, written from scratch on top of
//!   dense matrix products.
//! - [`meta`]: meta-learning task datasets, context/target sampling and the
//!   on-disk manifest.
//! - [`train`]: the CNP training loop.
//! - [`eval`]: physical baselines, RMSE and the robustness experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cnp;
pub mod error;
pub mod eval;
pub mod meta;
pub mod sim;
pub mod train;
pub mod vehicle;

pub use error::{Error, Result};
