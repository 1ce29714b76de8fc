//! Decay-law fits and cross-method discrepancy reports.

mod discrepancy;
mod fit;

pub use discrepancy::{compare_methods, compare_with, DiscrepancyReport, PointDiff};
pub use fit::{fit_spacelike_decay, fit_timelike_oscillation, log_linear_fit, DecayFit, OscillationFit};
