//! Stochastic-geometry toolkit for SIR gains in cellular networks: point
//! fields, closed-form MISR results, fading models and a reproducible
//! Monte Carlo engine.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod fading;
pub mod pointfields;
pub mod rng;
pub mod simkernel;
pub mod special;

pub use error::{Error, Result};
