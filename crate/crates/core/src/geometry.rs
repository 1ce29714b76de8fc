//! Waveguide cross-section, mode cutoffs, dispersion and interval bookkeeping.
//!
//! Natural units throughout (hbar = c = 1): lengths and inverse frequencies
//! share a single unit.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Infinitely long, perfectly conducting rectangular guide along axis 3.
///
/// The cross-section satisfies `0 < b1 <= b2`, so the lowest cutoff is the
/// (r, s) = (0, 1) mode at `pi / b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waveguide {
    b1: f64,
    b2: f64,
}

impl Waveguide {
    pub fn new(b1: f64, b2: f64) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite()) {
            return Err(Error::InvalidWaveguide(format!(
                "dimensions must be finite (b1 = {b1}, b2 = {b2})"
            )));
        }
        if b1 <= 0.0 || b2 <= 0.0 {
            return Err(Error::InvalidWaveguide(format!(
                "dimensions must be positive (b1 = {b1}, b2 = {b2})"
            )));
        }
        if b1 > b2 {
            return Err(Error::InvalidWaveguide(format!(
                "expected b1 <= b2 (b1 = {b1}, b2 = {b2})"
            )));
        }
        Ok(Waveguide { b1, b2 })
    }

    /// Guide whose lowest cutoff equals `omega_c`, with a square cross-section.
    pub fn with_cutoff(omega_c: f64) -> Result<Self> {
        let b2 = PI / omega_c;
        Waveguide::new(b2, b2)
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn cutoff_frequency(&self, mode: ModeIndex) -> f64 {
        if mode.r == 0 {
            return PI * f64::from(mode.s) / self.b2;
        }
        let r = f64::from(mode.r) / self.b1;
        let s = f64::from(mode.s) / self.b2;
        PI * r.hypot(s)
    }

    /// The (0, 1) cutoff `pi / b2`, written `omega_c` elsewhere in the crate.
    pub fn lowest_cutoff(&self) -> f64 {
        PI / self.b2
    }

    /// Frequency of a guided photon with longitudinal wavenumber `k3`.
    pub fn dispersion_omega(&self, k3: f64) -> f64 {
        self.lowest_cutoff().hypot(k3)
    }

    /// Decay constant `q` of the evanescent wave `exp(-q r)` at frequency `omega`.
    pub fn evanescent_q(&self, omega: f64) -> Result<f64> {
        let wc = self.lowest_cutoff();
        if !(omega > 0.0 && omega < wc) {
            return Err(Error::OmegaNotEvanescent { omega, cutoff: wc });
        }
        Ok(((wc - omega) * (wc + omega)).sqrt())
    }
}

/// Transverse mode label; `r >= 0`, `s >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    r: u32,
    s: u32,
}

impl ModeIndex {
    pub fn new(r: u32, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidMode { r, s });
        }
        Ok(ModeIndex { r, s })
    }

    pub const LOWEST: ModeIndex = ModeIndex { r: 0, s: 1 };

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Timelike,
    Spacelike,
    Lightlike,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Timelike => "timelike",
            Regime::Spacelike => "spacelike",
            Regime::Lightlike => "lightlike",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sign test on `t^2 - r^2` with a caller-supplied dead band `eps`.
pub fn classify_interval(t: f64, r: f64, eps: f64) -> Regime {
    let s = invariant_square(t, r);
    if s > eps {
        Regime::Timelike
    } else if s < -eps {
        Regime::Spacelike
    } else {
        Regime::Lightlike
    }
}

fn invariant_square(t: f64, r: f64) -> f64 {
    // (t - r)(t + r) keeps relative accuracy near the light cone
    (t - r) * (t + r)
}

/// Separation between the source at the origin and the field point
/// `(t, 0, x2_offset, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeInterval {
    pub t: f64,
    pub r: f64,
    #[serde(default)]
    pub x2_offset: f64,
}

impl SpacetimeInterval {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        Self::with_offset(t, r, 0.0)
    }

    pub fn with_offset(t: f64, r: f64, x2_offset: f64) -> Result<Self> {
        if !(t >= 0.0 && r >= 0.0) || !t.is_finite() || !r.is_finite() || !x2_offset.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "interval needs finite t >= 0 and r >= 0 (t = {t}, r = {r})"
            )));
        }
        Ok(SpacetimeInterval { t, r, x2_offset })
    }

    pub fn invariant_square(&self) -> f64 {
        invariant_square(self.t, self.r)
    }

    pub fn regime(&self, eps: f64) -> Regime {
        classify_interval(self.t, self.r, eps)
    }
}

/// Boost a rest-frame (timelike) or simultaneity-frame (spacelike) interval
/// by rapidity `phi`, returning `(t, r)` with `t^2 - r^2 = invariant_square`.
pub fn frame_parametrize(invariant_square: f64, phi: f64) -> Result<(f64, f64)> {
    if invariant_square == 0.0 {
        return Err(Error::LightlikeUnparametrizable);
    }
    if !(phi >= 0.0) || !phi.is_finite() || !invariant_square.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rapidity must be finite and non-negative (phi = {phi})"
        )));
    }
    let scale = invariant_square.abs().sqrt();
    let (ch, sh) = (phi.cosh(), phi.sinh());
    if invariant_square > 0.0 {
        Ok((scale * ch, scale * sh))
    } else {
        Ok((scale * sh, scale * ch))
    }
}
