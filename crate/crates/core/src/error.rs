use thiserror::Error;

use crate::ComplexValue;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid waveguide: {0}")]
    InvalidWaveguide(String),

    #[error("invalid mode index (r={r}, s={s}): s must be at least 1")]
    InvalidMode { r: u32, s: u32 },

    #[error("frequency {omega} is not evanescent for cutoff {cutoff} (need 0 < omega < cutoff)")]
    OmegaNotEvanescent { omega: f64, cutoff: f64 },

    #[error("a lightlike interval has no rest or simultaneity frame")]
    LightlikeUnparametrizable,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order {0} is not supported (orders 0, 1, 2 only)")]
    OrderUnsupported(u32),

    #[error("{function} is undefined at x = {x}")]
    DomainError { function: &'static str, x: f64 },

    #[error("argument {re}{im:+}i lies off the positive real and negative imaginary rays")]
    RayUnsupported { re: f64, im: f64 },

    #[error("asymptotic form needs |z| >= 5, got |z| = {0}")]
    ArgumentTooSmall(f64),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {value}, error estimate {error_estimate:e})"
    )]
    QuadratureFailure {
        value: ComplexValue,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("integrand tail does not decay: doubling the cutoff at u = {cutoff} kept changing the result")]
    TailNotDecaying { cutoff: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("closed form is singular on the light cone (t = {t}, r = {r})")]
    LightconeSingular { t: f64, r: f64 },

    #[error("frame-reduced closed form needs t = 0 or r = 0 (got t = {t}, r = {r})")]
    FrameRequired { t: f64, r: f64 },

    #[error("finite-difference step {step:e} is dominated by roundoff (Richardson levels disagree by {disagreement:e})")]
    StepTooSmall { step: f64, disagreement: f64 },

    #[error("finite-difference step {step:e} is too coarse (Richardson levels disagree by {disagreement:e})")]
    StepTooLarge { step: f64, disagreement: f64 },

    #[error("tensor index ({i}, {j}) out of range 1..=3")]
    InvalidIndex { i: usize, j: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-positive modulus {modulus} at coordinate {at}")]
    NonPositiveModulus { at: f64, modulus: f64 },

    #[error("no oscillation detected ({crossings} zero crossings, need at least 4)")]
    NoOscillationDetected { crossings: usize },

    #[error("no asymptotic model for a lightlike interval")]
    ModelUndefined,

    #[error("at (t = {t}, r = {r}): {source}")]
    AtPoint {
        t: f64,
        r: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, t: f64, r: f64) -> Self {
        Error::AtPoint {
            t,
            r,
            source: Box::new(self),
        }
    }

    /// Stable snake-case name of the innermost variant.
    pub fn code(&self) -> &'static str {
        match self.root() {
            Error::InvalidWaveguide(_) => "invalid_waveguide",
            Error::InvalidMode { .. } => "invalid_mode",
            Error::OmegaNotEvanescent { .. } => "omega_not_evanescent",
            Error::LightlikeUnparametrizable => "lightlike_unparametrizable",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::OrderUnsupported(_) => "order_unsupported",
            Error::DomainError { .. } => "domain_error",
            Error::RayUnsupported { .. } => "ray_unsupported",
            Error::ArgumentTooSmall(_) => "argument_too_small",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::TailNotDecaying { .. } => "tail_not_decaying",
            Error::InvalidQuadratureSpec(_) => "invalid_quadrature_spec",
            Error::LightconeSingular { .. } => "lightcone_singular",
            Error::FrameRequired { .. } => "frame_required",
            Error::StepTooSmall { .. } => "step_too_small",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::InvalidIndex { .. } => "invalid_index",
            Error::InsufficientData(_) => "insufficient_data",
            Error::NonPositiveModulus { .. } => "non_positive_modulus",
            Error::NoOscillationDetected { .. } => "no_oscillation_detected",
            Error::ModelUndefined => "model_undefined",
            Error::AtPoint { .. } => unreachable!("root strips point attribution"),
        }
    }

    /// Innermost error, stripping point attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
