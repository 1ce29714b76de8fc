//! C ABI over the `evanescent` crate.
//!
//! Every function returns an [`EvStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and read back with
//! [`ev_last_error_message`]. Waveguides are opaque handles owned by the
//! caller and released with [`ev_waveguide_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use evanescent::analysis::fit_spacelike_decay;
use evanescent::config::RunConfig;
use evanescent::correlator::{s11_closed, s11_quadrature, s_ij_quadrature, ClosedVariant};
use evanescent::geometry::{ModeIndex, Waveguide};
use evanescent::propagator::{d_closed, d_evanescent_quadrature};
use evanescent::quadrature::QuadratureSpec;
use evanescent::special::{bessel_j, bessel_k, bessel_y, hankel2, KernelBasis};
use evanescent::verify::run_verify;
use evanescent::{ComplexValue, Error};

/// Status codes. `EV_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidWaveguide = 3,
    DomainError = 4,
    LightconeSingular = 5,
    FrameRequired = 6,
    QuadratureFailure = 7,
    FitFailure = 8,
    Panic = 9,
}

/// Selects the kernel basis of a closed form.
pub const EV_BASIS_STANDARD_HANKEL: u32 = 0;
pub const EV_BASIS_PAPER_KERNEL: u32 = 1;
/// Selects the closed-form variant of `S11`.
pub const EV_VARIANT_PRINTED: u32 = 0;
pub const EV_VARIANT_REDERIVED: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvComplex {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexValue> for EvComplex {
    fn from(z: ComplexValue) -> Self {
        EvComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvQuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail_bound_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvDecayFit {
    pub amplitude: f64,
    pub rate: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub window_min: f64,
    pub window_max: f64,
    pub n_points: usize,
}

/// Opaque waveguide handle.
pub struct EvWaveguide {
    inner: Waveguide,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EvStatus {
    match e.root() {
        Error::InvalidWaveguide(_) | Error::InvalidMode { .. } => EvStatus::InvalidWaveguide,
        Error::DomainError { .. }
        | Error::RayUnsupported { .. }
        | Error::ArgumentTooSmall(_)
        | Error::OrderUnsupported(_)
        | Error::OmegaNotEvanescent { .. } => EvStatus::DomainError,
        Error::LightconeSingular { .. } => EvStatus::LightconeSingular,
        Error::FrameRequired { .. } => EvStatus::FrameRequired,
        Error::QuadratureFailure { .. } | Error::TailNotDecaying { .. } => EvStatus::QuadratureFailure,
        Error::InsufficientData(_) | Error::NonPositiveModulus { .. } | Error::NoOscillationDetected { .. } => {
            EvStatus::FitFailure
        }
        _ => EvStatus::InvalidArgument,
    }
}

/// Runs `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), EvStatusError>) -> EvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EvStatus::Ok
        }
        Ok(Err(EvStatusError(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EvStatus::Panic
        }
    }
}

struct EvStatusError(EvStatus, String);

impl From<Error> for EvStatusError {
    fn from(e: Error) -> Self {
        EvStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> EvStatusError {
    EvStatusError(EvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), EvStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn waveguide<'a>(wg: *const EvWaveguide) -> Result<&'a Waveguide, EvStatusError> {
    wg.as_ref().map(|w| &w.inner).ok_or_else(|| null("waveguide"))
}

unsafe fn spec_or_default(spec: *const EvQuadratureSpec) -> Result<QuadratureSpec, EvStatusError> {
    match spec.as_ref() {
        None => Ok(QuadratureSpec::default()),
        Some(s) => Ok(QuadratureSpec::new(s.abs_tol, s.rel_tol, s.max_subdivisions, s.tail_bound_tol)?),
    }
}

fn basis(code: u32) -> Result<KernelBasis, EvStatusError> {
    match code {
        EV_BASIS_STANDARD_HANKEL => Ok(KernelBasis::StandardHankel),
        EV_BASIS_PAPER_KERNEL => Ok(KernelBasis::PaperKernel),
        other => Err(EvStatusError(EvStatus::InvalidArgument, format!("unknown basis code {other}"))),
    }
}

fn variant(code: u32) -> Result<ClosedVariant, EvStatusError> {
    match code {
        EV_VARIANT_PRINTED => Ok(ClosedVariant::PaperPrinted),
        EV_VARIANT_REDERIVED => Ok(ClosedVariant::Rederived),
        other => Err(EvStatusError(EvStatus::InvalidArgument, format!("unknown variant code {other}"))),
    }
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ev_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default quadrature tolerances.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_quadrature_spec_default(out: *mut EvQuadratureSpec) -> EvStatus {
    guard(|| {
        let d = QuadratureSpec::default();
        write(
            out,
            EvQuadratureSpec {
                abs_tol: d.abs_tol,
                rel_tol: d.rel_tol,
                max_subdivisions: d.max_subdivisions,
                tail_bound_tol: d.tail_bound_tol,
            },
        )
    })
}

/// Creates a waveguide with `0 < b1 <= b2`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_waveguide_new(b1: f64, b2: f64, out: *mut *mut EvWaveguide) -> EvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = Waveguide::new(b1, b2)?;
        out.write(Box::into_raw(Box::new(EvWaveguide { inner })));
        Ok(())
    })
}

/// Releases a handle from [`ev_waveguide_new`]. Null is ignored.
///
/// # Safety
/// `wg` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ev_waveguide_free(wg: *mut EvWaveguide) {
    if !wg.is_null() {
        drop(Box::from_raw(wg));
    }
}

/// `omega_c = pi / b2`.
///
/// # Safety
/// `wg` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_lowest_cutoff(wg: *const EvWaveguide, out: *mut f64) -> EvStatus {
    guard(|| write(out, waveguide(wg)?.lowest_cutoff()))
}

/// Cutoff of mode `(r, s)`, `s >= 1`.
///
/// # Safety
/// As [`ev_lowest_cutoff`].
#[no_mangle]
pub unsafe extern "C" fn ev_cutoff_frequency(wg: *const EvWaveguide, r: u32, s: u32, out: *mut f64) -> EvStatus {
    guard(|| {
        let mode = ModeIndex::new(r, s)?;
        write(out, waveguide(wg)?.cutoff_frequency(mode))
    })
}

/// `D(t, r)` by quadrature. `spec` may be null for the defaults.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_propagator_quadrature(
    wg: *const EvWaveguide,
    t: f64,
    r: f64,
    spec: *const EvQuadratureSpec,
    out: *mut EvComplex,
) -> EvStatus {
    guard(|| {
        let v = d_evanescent_quadrature(waveguide(wg)?, t, r, &spec_or_default(spec)?)?;
        write(out, v.value.into())
    })
}

/// Closed-form `D(t, r)` in basis `EV_BASIS_*`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_propagator_closed(
    wg: *const EvWaveguide,
    t: f64,
    r: f64,
    basis_code: u32,
    spec: *const EvQuadratureSpec,
    eps_light: f64,
    out: *mut EvComplex,
) -> EvStatus {
    guard(|| {
        let v = d_closed(waveguide(wg)?, t, r, basis(basis_code)?, &spec_or_default(spec)?, eps_light)?;
        write(out, v.value.into())
    })
}

/// `S11(t, r)` by quadrature.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_s11_quadrature(
    wg: *const EvWaveguide,
    t: f64,
    r: f64,
    spec: *const EvQuadratureSpec,
    out: *mut EvComplex,
) -> EvStatus {
    guard(|| {
        let v = s11_quadrature(waveguide(wg)?, t, r, &spec_or_default(spec)?)?;
        write(out, v.value.into())
    })
}

/// Closed-form `S11(t, r)`: variant `EV_VARIANT_*`, basis `EV_BASIS_*`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_s11_closed(
    wg: *const EvWaveguide,
    t: f64,
    r: f64,
    variant_code: u32,
    basis_code: u32,
    spec: *const EvQuadratureSpec,
    eps_light: f64,
    out: *mut EvComplex,
) -> EvStatus {
    guard(|| {
        let v = s11_closed(
            waveguide(wg)?,
            t,
            r,
            variant(variant_code)?,
            basis(basis_code)?,
            &spec_or_default(spec)?,
            eps_light,
        )?;
        write(out, v.value.into())
    })
}

/// `S_ij(t, r)` at transverse offset `x2`, indices in 1..=3.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_s_ij_quadrature(
    wg: *const EvWaveguide,
    t: f64,
    r: f64,
    x2: f64,
    i: u32,
    j: u32,
    spec: *const EvQuadratureSpec,
    out: *mut EvComplex,
) -> EvStatus {
    guard(|| {
        let v = s_ij_quadrature(waveguide(wg)?, t, r, x2, i as usize, j as usize, &spec_or_default(spec)?)?;
        write(out, v.value.into())
    })
}

/// `H_order^(2)(z)` for real `z > 0` or `z = -i x`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_hankel2(order: u32, z: EvComplex, out: *mut EvComplex) -> EvStatus {
    guard(|| write(out, hankel2(order, ComplexValue::new(z.re, z.im))?.into()))
}

/// `J_order(x)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_bessel_j(order: u32, x: f64, out: *mut f64) -> EvStatus {
    guard(|| write(out, bessel_j(order, x)?))
}

/// `Y_order(x)`, `x > 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_bessel_y(order: u32, x: f64, out: *mut f64) -> EvStatus {
    guard(|| write(out, bessel_y(order, x)?))
}

/// `K_order(x)`, `x > 0`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ev_bessel_k(order: u32, x: f64, out: *mut f64) -> EvStatus {
    guard(|| write(out, bessel_k(order, x)?))
}

/// Fits `A r^p exp(-rate r)` to `n` samples.
///
/// # Safety
/// `r` and `modulus` must each point to `n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ev_fit_spacelike_decay(
    r: *const f64,
    modulus: *const f64,
    n: usize,
    out: *mut EvDecayFit,
) -> EvStatus {
    guard(|| {
        if r.is_null() || modulus.is_null() {
            return Err(null("sample array"));
        }
        let (rs, ms) = (std::slice::from_raw_parts(r, n), std::slice::from_raw_parts(modulus, n));
        let samples: Vec<(f64, f64)> = rs.iter().copied().zip(ms.iter().copied()).collect();
        let f = fit_spacelike_decay(&samples)?;
        write(
            out,
            EvDecayFit {
                amplitude: f.amplitude,
                rate: f.rate,
                exponent: f.exponent,
                r_squared: f.r_squared,
                window_min: f.window.0,
                window_max: f.window.1,
                n_points: f.n_points,
            },
        )
    })
}

/// Runs the verification battery for guide `(b1, b2)` with default settings
/// and returns the JSON report, to be released with [`ev_string_free`].
/// `all_passed` (nullable) receives 1 when every assertable check passed.
///
/// # Safety
/// `out` must be valid for writes; `all_passed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ev_verify_json(b1: f64, b2: f64, out: *mut *mut c_char, all_passed: *mut i32) -> EvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let cfg = RunConfig {
            b1,
            b2,
            ..RunConfig::default()
        };
        cfg.validate()
            .map_err(|e| EvStatusError(EvStatus::InvalidWaveguide, e.to_string()))?;
        let report = run_verify(&cfg);
        let text = serde_json::to_string(&report.json).expect("json serialization");
        if !all_passed.is_null() {
            all_passed.write(i32::from(report.all_passed()));
        }
        out.write(CString::new(text).expect("json has no nul").into_raw());
        Ok(())
    })
}

/// Releases a string from this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn ev_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
