//! Online logistic regression with Gaussian-prior exponential weights.
//!
//! The EW forecast for a new point is the posterior mean of the sigmoid
//! under `exp(-V_t)`, where `V_t` is the cumulative logistic loss plus
//! `|theta|^2 / (2 B^2)`. It is computed three ways:
//!
//! - [`predictors::ExactEw`]: adaptive quadrature in dimension one or two
//!   (feature `exact`).
//! - [`predictors::McTheory`]: independent MALA chains carried between
//!   rounds through a tempered bridge, with a per-round error budget.
//! - [`predictors::McPractical`]: one warm-started chain with pilot step-size
//!   adaptation.
//!
//! [`geometry`] covers the separable regime (hard-margin SVM, version cones,
//! the large-`B` solid-angle voter and the margin-based loss bound), and
//! [`harness`] runs online experiments, regret sweeps and numerical checks.
//! Parallel loops go through [`par`], which falls back to sequential code
//! without the `parallel` feature.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data_io;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod loss;
pub mod optim;
pub mod par;
pub mod posterior;
pub mod predictors;
#[cfg(feature = "exact")]
pub mod quadrature;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
