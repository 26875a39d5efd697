//! Exact distribution of the mean of `n` i.i.d. products of zero-mean
//! correlated normal random variables, together with a numerical
//! verification battery for its Stein characterization, its characterizing
//! ODE and the Bessel integral identity that fixes its normalizing constant.
//!
//! * [`special`]: Γ, `K_ν`, `I_ν` for integer and half-integer orders.
//! * [`numerics`]: adaptive quadrature, bracketed root finding, finite differences.
//! * [`distribution`]: density, CDF, quantiles and moments.
//! * [`sampling`]: seed-reproducible sampling.
//! * [`verify`]: Monte Carlo and quadrature checks producing [`verify::CheckReport`]s.
//! * [`cli`]: the command-line front end.

// `!(x > 0.0)` style guards are used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distribution;
pub mod error;
pub mod exec;
pub mod numerics;
pub mod sampling;
pub mod special;
pub mod verify;

pub use distribution::{ProductNormal, ProductNormalParams};
pub use error::{Error, Result};
pub use exec::Execution;
pub use sampling::{SampleBatch, Seed};
pub use special::BesselOrder;
