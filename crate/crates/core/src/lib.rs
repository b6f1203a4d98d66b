//! Two-dimensional Helmholtz obstacle and grating scattering.
//!
//! Direct solvers (modified Rayleigh conjecture least squares and a Nyström
//! boundary integral reference), closed-form circle oracles, and the support
//! function and linear sampling inverse methods.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biem;
pub mod error;
pub mod farfield;
pub mod geometry;
pub mod grating;
pub mod lsm;
pub mod lstsq;
pub mod mrc;
pub mod oracles;
pub mod sfm;
pub mod specfun;

pub use error::{Error, Result};
