//! Discrete scale-space numerics.
//!
//! This crate provides discrete approximations of Gaussian smoothing and
//! Gaussian derivatives on integer grids, quality metrics for comparing the
//! approximations against their continuous counterparts, feature detectors
//! with automatic scale selection, and small-support directional and affine
//! derivative masks.
//!
//! The scale parameter `s` is the variance of the underlying Gaussian
//! (`sigma = sqrt(s)`) throughout. All kernels are dense coefficient arrays
//! over a symmetric integer support `[-N, N]` and are applied by discrete
//! convolution.
//!
//! The crate is `no_std` compatible; it needs only `alloc` and the `libm`
//! math routines.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod directional;
pub mod error;
pub mod kernels;
pub mod metrics;
pub mod scalesel;
pub mod signal;
pub mod specfun;

pub use error::{Error, Result};
