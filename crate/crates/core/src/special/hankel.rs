//! Hankel functions of the second kind on the two rays the closed-form
//! propagator visits, plus the finite-interval kernel
//! `P0(z) = (2/pi) int_0^{pi/2} exp(-i z sin(theta)) d(theta)` and its
//! recurrence-defined companions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j, bessel_k, bessel_y, hankel2_expansion};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureSpec};

/// Which function stands behind `H_nu^(2)` in the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelBasis {
    /// `J_nu - i Y_nu`, continued to the negative imaginary axis through `K_nu`.
    StandardHankel,
    /// The finite `theta` integral and its recurrence-defined orders 1 and 2.
    PaperKernel,
}

impl KernelBasis {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelBasis::StandardHankel => "standard_hankel",
            KernelBasis::PaperKernel => "paper_kernel",
        }
    }
}

impl fmt::Display for KernelBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelBasis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" | "standard_hankel" | "hankel" => Ok(KernelBasis::StandardHankel),
            "paper" | "paper_kernel" => Ok(KernelBasis::PaperKernel),
            other => Err(format!("unknown basis '{other}' (expected standard or paper)")),
        }
    }
}

/// A point on one of the supported rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ray {
    /// `z = x`, `x > 0`
    Real(f64),
    /// `z = -i x`, `x > 0`
    NegativeImaginary(f64),
    Origin,
}

impl Ray {
    pub fn of(z: Complex64) -> Result<Ray> {
        if z.re == 0.0 && z.im == 0.0 {
            Ok(Ray::Origin)
        } else if z.im == 0.0 && z.re > 0.0 && z.re.is_finite() {
            Ok(Ray::Real(z.re))
        } else if z.re == 0.0 && z.im < 0.0 && z.im.is_finite() {
            Ok(Ray::NegativeImaginary(-z.im))
        } else {
            Err(Error::RayUnsupported { re: z.re, im: z.im })
        }
    }
}

fn check_order(order: u32) -> Result<()> {
    if order > 2 {
        Err(Error::OrderUnsupported(order))
    } else {
        Ok(())
    }
}

/// `c_nu` in `H_nu^(2)(-i x) = c_nu K_nu(x)`: `(2/pi) i^(nu+1)`.
///
/// Pinned by matching Hankel's large-argument expansion on the negative
/// imaginary axis against `K_nu` (see the connection-constant tests).
pub fn connection_constant(order: u32) -> Complex64 {
    let scale = 2.0 / PI;
    match order % 4 {
        0 => Complex64::new(0.0, scale),
        1 => Complex64::new(-scale, 0.0),
        2 => Complex64::new(0.0, -scale),
        _ => Complex64::new(scale, 0.0),
    }
}

/// `H_nu^(2)(z)` for `z > 0` or `z = -i x`.
pub fn hankel2(order: u32, z: Complex64) -> Result<Complex64> {
    check_order(order)?;
    match Ray::of(z)? {
        Ray::Origin => Err(Error::DomainError { function: "hankel2", x: 0.0 }),
        Ray::Real(x) => Ok(Complex64::new(bessel_j(order, x)?, -bessel_y(order, x)?)),
        Ray::NegativeImaginary(x) => Ok(connection_constant(order) * bessel_k(order, x)?),
    }
}

/// Leading large-argument form `sqrt(2/(pi z)) exp[-i(z - nu pi/2 - pi/4)]`.
pub fn hankel2_asymptotic(order: u32, z: Complex64) -> Result<Complex64> {
    Ray::of(z)?;
    let size = z.norm();
    if size < 5.0 {
        return Err(Error::ArgumentTooSmall(size));
    }
    let phase = z - f64::from(order) * FRAC_PI_2 - FRAC_PI_4;
    Ok((2.0 / (PI * z)).sqrt() * (Complex64::new(0.0, -1.0) * phase).exp())
}

/// Hankel's full asymptotic expansion, optimally truncated.
pub fn hankel2_asymptotic_series(order: u32, z: Complex64) -> Result<Complex64> {
    check_order(order)?;
    Ray::of(z)?;
    let size = z.norm();
    if size < 5.0 {
        return Err(Error::ArgumentTooSmall(size));
    }
    Ok(hankel2_expansion(order, z))
}

/// The finite-interval kernel of order 0, 1 or 2.
///
/// Order 1 is `-dP0/dz` and order 2 follows from
/// `z^-1 P2 = -d[z^-1 P1]/dz`, both differentiated under the integral sign.
pub fn paper_kernel(order: u32, z: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    check_order(order)?;
    let ray = Ray::of(z)?;
    if order == 2 && ray == Ray::Origin {
        return Err(Error::DomainError { function: "paper_kernel(2)", x: 0.0 });
    }
    let minus_i_z = Complex64::new(0.0, -1.0) * z;
    let i = Complex64::new(0.0, 1.0);
    let inv_z = if order == 2 { 1.0 / z } else { Complex64::new(0.0, 0.0) };
    let integrand = |theta: f64| {
        let s = theta.sin();
        let wave = (minus_i_z * s).exp();
        match order {
            0 => wave,
            1 => i * s * wave,
            _ => (i * s * inv_z - s * s) * wave,
        }
    };
    let res = integrate_finite(integrand, 0.0, FRAC_PI_2, spec)?;
    Ok(res.value * (2.0 / PI))
}

/// `C(z) = (2i/pi) int_0^inf exp(-z sinh u) du` for real `z > 0`.
///
/// `paper_kernel(0, z) + C(z)` reproduces `H_0^(2)(z)` on the real axis.
pub fn hankel_completion(z: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    let x = match Ray::of(z)? {
        Ray::Real(x) => x,
        _ => return Err(Error::RayUnsupported { re: z.re, im: z.im }),
    };
    let res = integrate_semi_infinite(|u| Complex64::new((-x * u.sinh()).exp(), 0.0), 0.0, spec)?;
    Ok(Complex64::new(0.0, 2.0 / PI) * res.value)
}

/// Order-`nu` kernel in the requested basis.
pub fn kernel(basis: KernelBasis, order: u32, z: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    match basis {
        KernelBasis::StandardHankel => hankel2(order, z),
        KernelBasis::PaperKernel => paper_kernel(order, z, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm())
    }

    #[test]
    fn real_axis_is_j_minus_iy() {
        let h = hankel2(0, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(h.re, bessel_j(0, 2.0).unwrap());
        assert_eq!(h.im, -bessel_y(0, 2.0).unwrap());
    }

    #[test]
    fn connection_constants_from_asymptotic_matching() {
        // Hankel's expansion continued to z = -ix versus the K integral.
        for order in 0..=2u32 {
            for &x in &[10.0, 20.0, 30.0] {
                let series = hankel2_expansion(order, Complex64::new(0.0, -x));
                let measured = series / bessel_k(order, x).unwrap();
                assert!(
                    rel(measured, connection_constant(order)) < 1e-8,
                    "order {order} x {x}: {measured}"
                );
            }
        }
        assert!(rel(connection_constant(0), Complex64::new(0.0, 2.0 / PI)) < 1e-16);
        assert!(rel(connection_constant(1), Complex64::new(-2.0 / PI, 0.0)) < 1e-16);
    }

    #[test]
    fn rays_are_enforced() {
        assert!(matches!(hankel2(0, Complex64::new(1.0, 1.0)), Err(Error::RayUnsupported { .. })));
        assert!(matches!(hankel2(0, Complex64::new(0.0, 1.0)), Err(Error::RayUnsupported { .. })));
        assert!(matches!(hankel2(0, Complex64::new(-1.0, 0.0)), Err(Error::RayUnsupported { .. })));
        assert!(matches!(hankel2(3, Complex64::new(1.0, 0.0)), Err(Error::OrderUnsupported(3))));
    }

    #[test]
    fn asymptotic_examples() {
        let z = Complex64::new(20.0, 0.0);
        assert!(rel(hankel2_asymptotic(0, z).unwrap(), hankel2(0, z).unwrap()) < 1e-2);
        let zi = Complex64::new(0.0, -20.0);
        let a = hankel2_asymptotic(0, zi).unwrap();
        let lead = (2.0 / (PI * 20.0)).sqrt() * (-20f64).exp();
        assert!((a.norm() / lead - 1.0).abs() < 0.05);
        let ratio = hankel2_asymptotic(1, z).unwrap() / hankel2_asymptotic(0, z).unwrap();
        assert!(rel(ratio, Complex64::new(0.0, 1.0)) < 1e-14);
        assert!(matches!(hankel2_asymptotic(0, Complex64::new(4.9, 0.0)), Err(Error::ArgumentTooSmall(_))));
    }

    #[test]
    fn paper_kernel_origin_values() {
        let z0 = Complex64::new(0.0, 0.0);
        assert!(rel(paper_kernel(0, z0, &spec()).unwrap(), Complex64::new(1.0, 0.0)) < 1e-13);
        // -dP0/dz at 0 is (2/pi) int i sin = 2i/pi
        let p1 = paper_kernel(1, z0, &spec()).unwrap();
        assert!(rel(p1, Complex64::new(0.0, 2.0 / PI)) < 1e-13, "{p1}");
        assert!(paper_kernel(2, z0, &spec()).is_err());
    }

    #[test]
    fn paper_kernel_damped_ray() {
        let direct = integrate_finite(|t: f64| Complex64::new((-5.0 * t.sin()).exp(), 0.0), 0.0, FRAC_PI_2, &spec())
            .unwrap()
            .value
            * (2.0 / PI);
        let got = paper_kernel(0, Complex64::new(0.0, -5.0), &spec()).unwrap();
        assert!(rel(got, direct) < 1e-12);
        assert!(got.im.abs() < 1e-16);
    }

    #[test]
    fn paper_kernel_real_part_is_j0() {
        for &x in &[0.3, 1.0, 4.0, 9.5, 17.0, 33.0] {
            let p = paper_kernel(0, Complex64::new(x, 0.0), &spec()).unwrap();
            let j = bessel_j(0, x).unwrap();
            assert!((p.re - j).abs() <= 1e-8 * j.abs().max(1e-3), "x={x}: {} vs {j}", p.re);
        }
    }

    #[test]
    fn completion_reconciles_kernels() {
        let c1 = hankel_completion(Complex64::new(1.0, 0.0), &spec()).unwrap();
        assert!(c1.re == 0.0 && c1.im > 0.0);
        let mut last = f64::INFINITY;
        for &x in &[0.5, 1.0, 2.0, 5.0, 10.0, 40.0] {
            let z = Complex64::new(x, 0.0);
            let c = hankel_completion(z, &spec()).unwrap();
            assert!(c.norm() < last);
            last = c.norm();
            let sum = paper_kernel(0, z, &spec()).unwrap() + c;
            assert!(rel(sum, hankel2(0, z).unwrap()) < 1e-9, "x={x}");
        }
        assert!(hankel_completion(Complex64::new(0.0, -1.0), &spec()).is_err());
    }

    #[test]
    fn recurrence_for_both_bases() {
        // a fixed step keeps the O(h^2) truncation below 1e-8 out to x = 50;
        // h = 1e-4 x would already reach 1e-6 at x = 25
        for &x in &[1.0, 3.0, 7.5, 12.0, 25.0, 50.0] {
            let h = 1e-4;
            for basis in [KernelBasis::StandardHankel, KernelBasis::PaperKernel] {
                let k = |order, x: f64| kernel(basis, order, Complex64::new(x, 0.0), &spec()).unwrap();
                let d0 = (k(0, x + h) - k(0, x - h)) / (2.0 * h);
                assert!(rel(d0, -k(1, x)) < 1e-6, "{basis} dH0 at {x}");
                let g = |x: f64| k(1, x) / x;
                let d1 = (g(x + h) - g(x - h)) / (2.0 * h);
                assert!(rel(k(2, x) / x, -d1) < 1e-5, "{basis} dH1 at {x}");
            }
        }
    }

    #[test]
    fn asymptotic_error_shrinks_on_real_ray() {
        let errs: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&x| {
                let z = Complex64::new(x, 0.0);
                rel(hankel2_asymptotic(0, z).unwrap(), hankel2(0, z).unwrap())
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn basis_parses() {
        assert_eq!("paper".parse::<KernelBasis>().unwrap(), KernelBasis::PaperKernel);
        assert_eq!("standard".parse::<KernelBasis>().unwrap(), KernelBasis::StandardHankel);
        assert!("other".parse::<KernelBasis>().is_err());
    }
}
