//! Equality separation for classification and anomaly detection.
//!
//! An equality separator labels a point by whether its affine score
//! `wᵀx + b` lies inside a margin `[-ε, ε]`, rather than by its sign. This
//! crate provides:
//!
//! - [`model`]: linear decision rules (equality, halfspace, RBF) and the
//!   twin-hyperplane pseudo likelihood ratio test.
//! - [`units`]: smooth activations (Gaussian bump, tanh bump, sigmoid,
//!   leaky ReLU, RBF unit) and losses with analytic gradients.
//! - [`optim`]: Adam, BFGS with Armijo backtracking, and early stopping.
//! - [`linear`]: bump-of-affine equality separators trained end to end.
//! - [`kernel`]: shallow equality separator over an RBF kernel expansion.
//! - [`network`]: feed-forward networks with halfspace, equality or RBF heads.
//! - [`data`]: deterministic synthetic generators and CSV I/O.
//! - [`metrics`]: average precision, separation diagnostics, score grids.
//! - [`geometry`]: closing-number probes, 2-D shattering and LRT checks.
//!
//! # Label convention
//!
//! Models use the neuron-activation convention: label `1` is the normal
//! class and sits inside the margin. [`metrics::aupr`] expects scores where
//! higher means *more anomalous*; use [`metrics::anomaly_aupr`] to flip a
//! normal-class score before evaluation.

pub mod data;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod network;
pub mod optim;
pub mod rng;
pub mod units;

mod vecops;

pub use error::{Error, Result};

/// Anything that maps a point to a real-valued score.
///
/// Used by the heatmap and separation diagnostics so that kernel machines,
/// networks, ensembles and plain classifiers can be evaluated uniformly.
pub trait Scorer {
    fn input_dim(&self) -> usize;

    fn score(&self, x: &[f64]) -> Result<f64>;
}
