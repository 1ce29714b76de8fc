//! Vacuum two-point function and electric-field correlator of photons in an
//! undersized rectangular waveguide, with closed-form and quadrature routes
//! and the fitting machinery used to test their decay laws.

// negated comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod correlator;
pub mod error;
pub mod evaluate;
pub mod format;
pub mod geometry;
pub mod propagator;
pub mod quadrature;
pub mod scan;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// Complex values throughout the crate.
pub type ComplexValue = num_complex::Complex64;
