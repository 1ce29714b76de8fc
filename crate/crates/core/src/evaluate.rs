//! Named evaluators of `D` and `S_11`, shared by the scan, fit and
//! comparison paths.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::correlator::{s11_closed, s11_finite_difference, s11_quadrature, ClosedVariant};
use crate::error::{Error, Result};
use crate::geometry::Waveguide;
use crate::propagator::{d_closed, d_evanescent_quadrature};
use crate::quadrature::QuadratureSpec;
use crate::special::KernelBasis;
use crate::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    D,
    S11,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::D => "D",
            Quantity::S11 => "S11",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "D" | "d" => Ok(Quantity::D),
            "S11" | "s11" => Ok(Quantity::S11),
            other => Err(format!("unknown quantity '{other}' (expected D or S11)")),
        }
    }
}

/// Everything an evaluator needs besides the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalContext {
    pub waveguide: Waveguide,
    pub quadrature: QuadratureSpec,
    pub eps_light: f64,
}

impl EvalContext {
    pub fn new(waveguide: Waveguide) -> Self {
        EvalContext {
            waveguide,
            quadrature: QuadratureSpec::default(),
            eps_light: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluator {
    DQuadrature,
    DClosed(KernelBasis),
    S11Quadrature,
    S11FiniteDifference,
    S11Closed(ClosedVariant, KernelBasis),
}

impl Evaluator {
    /// Builds an evaluator from CLI-style names. `basis` is required by
    /// closed forms and rejected elsewhere.
    pub fn from_parts(quantity: Quantity, method: &str, basis: Option<KernelBasis>) -> Result<Self> {
        let needs_basis = |e: fn(KernelBasis) -> Evaluator| {
            basis
                .map(e)
                .ok_or_else(|| Error::InvalidArgument(format!("method '{method}' needs a basis")))
        };
        let ev = match (quantity, method) {
            (Quantity::D, "quadrature") => Evaluator::DQuadrature,
            (Quantity::D, "closed") => needs_basis(Evaluator::DClosed)?,
            (Quantity::S11, "quadrature") => Evaluator::S11Quadrature,
            (Quantity::S11, "finite_difference" | "fd") => Evaluator::S11FiniteDifference,
            (Quantity::S11, "closed" | "rederived" | "closed_rederived") => {
                needs_basis(|b| Evaluator::S11Closed(ClosedVariant::Rederived, b))?
            }
            (Quantity::S11, "printed" | "closed_paper_printed") => {
                needs_basis(|b| Evaluator::S11Closed(ClosedVariant::PaperPrinted, b))?
            }
            (q, m) => {
                return Err(Error::InvalidArgument(format!(
                    "method '{m}' is not available for {}",
                    q.as_str()
                )))
            }
        };
        if !ev.is_closed() && basis.is_some() {
            return Err(Error::InvalidArgument(format!(
                "method '{method}' does not take a basis"
            )));
        }
        Ok(ev)
    }

    pub fn quantity(&self) -> Quantity {
        match self {
            Evaluator::DQuadrature | Evaluator::DClosed(_) => Quantity::D,
            _ => Quantity::S11,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Evaluator::DClosed(_) | Evaluator::S11Closed(..))
    }

    pub fn method_label(&self) -> &'static str {
        match self {
            Evaluator::DQuadrature | Evaluator::S11Quadrature => "quadrature",
            Evaluator::DClosed(_) => "closed",
            Evaluator::S11FiniteDifference => "finite_difference",
            Evaluator::S11Closed(v, _) => v.method().as_str(),
        }
    }

    pub fn basis(&self) -> Option<KernelBasis> {
        match self {
            Evaluator::DClosed(b) | Evaluator::S11Closed(_, b) => Some(*b),
            _ => None,
        }
    }

    pub fn evaluate(&self, ctx: &EvalContext, t: f64, r: f64) -> Result<ComplexValue> {
        let (wg, spec) = (&ctx.waveguide, &ctx.quadrature);
        match *self {
            Evaluator::DQuadrature => d_evanescent_quadrature(wg, t, r, spec).map(|s| s.value),
            Evaluator::DClosed(b) => d_closed(wg, t, r, b, spec, ctx.eps_light).map(|s| s.value),
            Evaluator::S11Quadrature => s11_quadrature(wg, t, r, spec).map(|s| s.value),
            Evaluator::S11FiniteDifference => s11_finite_difference(wg, t, r, spec, None).map(|s| s.value),
            Evaluator::S11Closed(v, b) => s11_closed(wg, t, r, v, b, spec, ctx.eps_light).map(|s| s.value),
        }
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.quantity().as_str(), self.method_label())?;
        if let Some(b) = self.basis() {
            write!(f, ":{}", b.as_str())?;
        }
        Ok(())
    }
}

pub fn waveguide_context(b1: f64, b2: f64) -> Result<EvalContext> {
    Ok(EvalContext::new(Waveguide::new(b1, b2)?))
}
