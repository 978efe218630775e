//! Spectral dynamics of weight matrices under SGD.
//!
//! Squared singular values of a weight matrix trained with noisy SGD behave as
//! mutually repelling particles. This crate carries the numerical machinery:
//!
//! - [`rmt`]: Marchenko–Pastur bulk and Tracy–Widom edge baselines.
//! - [`sde`]: Euler–Maruyama integration of the matrix-valued weight SDE.
//! - [`spectral`]: singular-value drifts, Dyson-type particle simulation and
//!   the stationary gamma law.
//! - [`forecast`]: bootstrapped-drift prediction of the top-k singular triplets.
//! - [`estimators`]: diffusion and gradient-noise constants, per-mode noise extraction.
//! - [`nn`]: a small MLP with manual backpropagation and an SGD trainer.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod estimators;
pub mod forecast;
pub mod linalg;
pub mod nn;
pub mod quad;
pub mod rmt;
pub mod rng;
pub mod sde;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::Matrix;
