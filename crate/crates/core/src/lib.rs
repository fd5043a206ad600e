//! Exact and approximate statistics of ratios of products of squared
//! Fisher-Snedecor F variates, with Kolmogorov-Smirnov validation, Monte
//! Carlo estimation, and secrecy / full-duplex relay performance metrics.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod fisher;
pub mod gof;
pub mod lognormal;
pub mod mellin;
pub mod montecarlo;
pub mod quadrature;
pub mod ratio;
pub mod specfun;
pub mod wireless;

pub use error::{Error, Result};
