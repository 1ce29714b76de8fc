//! Bessel functions of integer order 0, 1, 2 on the real axis.
//!
//! Ascending power series up to `SERIES_LIMIT`, the Hankel asymptotic
//! expansion beyond it. `K_nu` comes from its cosh integral representation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};

pub(crate) const SERIES_LIMIT: f64 = 12.0;
const MAX_ARGUMENT: f64 = 1e4;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

fn check_order(order: u32) -> Result<()> {
    if order > 2 {
        Err(Error::OrderUnsupported(order))
    } else {
        Ok(())
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / f64::from(k)).sum()
}

/// `J_n(x)` by its ascending series, `x >= 0`.
pub(crate) fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (f64::from(k) * f64::from(k + n));
        sum += term;
        if f64::from(k) > half && term.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if k > 200 {
            break;
        }
    }
    sum
}

/// `Y_n(x)` by its ascending series, `x > 0`.
pub(crate) fn y_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;

    // finite sum of negative powers
    let mut singular = 0.0;
    for k in 0..n {
        singular += factorial(n - k - 1) / factorial(k) * half.powi(2 * k as i32 - n as i32);
    }

    // psi(k+1) + psi(n+k+1) = -2 gamma + H_k + H_{n+k}
    let mut term = half.powi(n as i32) / factorial(n);
    let mut hk = 0.0;
    let mut hnk = harmonic(n);
    let mut sum = term * (hk + hnk - 2.0 * EULER_GAMMA);
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (f64::from(k) * f64::from(k + n));
        hk += 1.0 / f64::from(k);
        hnk += 1.0 / f64::from(k + n);
        let inc = term * (hk + hnk - 2.0 * EULER_GAMMA);
        sum += inc;
        if f64::from(k) > half && inc.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if k > 200 {
            break;
        }
    }

    (2.0 / PI) * half.ln() * j_series(n, x) - singular / PI - sum / PI
}

/// Hankel's expansion of `H_nu^(2)(z)` with optimal truncation, valid for
/// `|arg z| < pi` and large `|z|`.
pub(crate) fn hankel2_expansion(order: u32, z: Complex64) -> Complex64 {
    let mu = 4.0 * f64::from(order * order);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..=60u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * minus_i * ((mu - odd * odd) / (8.0 * f64::from(k))) / z;
        let size = next.norm();
        if size >= last && k > 10 {
            break;
        }
        term = next;
        sum += term;
        last = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    let phase = if z.im == 0.0 {
        // real argument: form the phase before exponentiating for large x
        let w = z.re - f64::from(order) * FRAC_PI_2 - FRAC_PI_4;
        Complex64::new(w.cos(), -w.sin())
    } else {
        (minus_i * (z - f64::from(order) * FRAC_PI_2 - FRAC_PI_4)).exp()
    };
    (2.0 / (PI * z)).sqrt() * phase * sum
}

fn check_magnitude(function: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::DomainError { function, x });
    }
    Ok(())
}

/// Bessel function of the first kind, `|x| <= 1e4`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    check_magnitude("bessel_j", x)?;
    let ax = x.abs();
    let value = if ax <= SERIES_LIMIT {
        j_series(order, ax)
    } else {
        hankel2_expansion(order, Complex64::new(ax, 0.0)).re
    };
    if x < 0.0 && order % 2 == 1 {
        Ok(-value)
    } else {
        Ok(value)
    }
}

/// Bessel function of the second kind, `0 < x <= 1e4`.
pub fn bessel_y(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    if !(x > 0.0) {
        return Err(Error::DomainError { function: "bessel_y", x });
    }
    check_magnitude("bessel_y", x)?;
    if x <= SERIES_LIMIT {
        Ok(y_series(order, x))
    } else {
        Ok(-hankel2_expansion(order, Complex64::new(x, 0.0)).im)
    }
}

fn k_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_subdivisions: 10_000,
        tail_bound_tol: 1e-16,
    }
}

/// `exp(x) K_nu(x)`, from `int_0^inf exp(-x (cosh u - 1)) cosh(nu u) du`.
pub fn bessel_k_scaled(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError { function: "bessel_k", x });
    }
    let nu = f64::from(order);
    let integrand = |u: f64| {
        let s = (0.5 * u).sinh();
        Complex64::new((-2.0 * x * s * s).exp() * (nu * u).cosh(), 0.0)
    };
    let res = integrate_semi_infinite(integrand, 0.0, &k_spec())?;
    Ok(res.value.re)
}

/// Modified Bessel function of the second kind, `x > 0`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}
