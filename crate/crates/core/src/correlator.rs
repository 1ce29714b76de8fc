//! Electric-field correlator `S_ij = (d_i d_j - delta_ij d_t^2) D`.
//!
//! Derivatives act under the `theta` integral of the propagator: `d_t`
//! brings down `-i omega`, `d_x2` brings down `i pi / b2`, `d_r` brings down
//! `-q`, and `d_x1` annihilates `D`. The `S_11` component therefore reduces
//! to `-d_t^2 D`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Regime, Waveguide};
use crate::propagator::{closed_argument, d_value, phase_factor, theta_integral};
use crate::quadrature::QuadratureSpec;
use crate::special::{kernel, KernelBasis};
use crate::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelatorMethod {
    Quadrature,
    FiniteDifference,
    ClosedPaperPrinted,
    ClosedRederived,
}

impl CorrelatorMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CorrelatorMethod::Quadrature => "quadrature",
            CorrelatorMethod::FiniteDifference => "finite_difference",
            CorrelatorMethod::ClosedPaperPrinted => "closed_paper_printed",
            CorrelatorMethod::ClosedRederived => "closed_rederived",
        }
    }
}

impl fmt::Display for CorrelatorMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which closed form of `S_11` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedVariant {
    /// `omega_c / (8 sqrt|x^2|) [H1 - t H2]`, bracket coefficient taken literally.
    PaperPrinted,
    /// Recurrence-derived frame forms: `(omega_c^2/8)[H1(z)/z - H2(z)]` at
    /// `r = 0`, `(i omega_c / 8r) H1(-i omega_c r)` at `t = 0`.
    Rederived,
}

impl ClosedVariant {
    pub fn method(&self) -> CorrelatorMethod {
        match self {
            ClosedVariant::PaperPrinted => CorrelatorMethod::ClosedPaperPrinted,
            ClosedVariant::Rederived => CorrelatorMethod::ClosedRederived,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ClosedVariant::PaperPrinted => "printed",
            ClosedVariant::Rederived => "rederived",
        }
    }
}

impl FromStr for ClosedVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "printed" | "paper_printed" => Ok(ClosedVariant::PaperPrinted),
            "rederived" => Ok(ClosedVariant::Rederived),
            other => Err(format!("unknown closed-form variant '{other}' (expected printed or rederived)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSample {
    pub t: f64,
    pub r: f64,
    pub i: usize,
    pub j: usize,
    pub value: ComplexValue,
    pub method: CorrelatorMethod,
    pub basis: Option<KernelBasis>,
}

impl CorrelatorSample {
    fn s11(t: f64, r: f64, value: ComplexValue, method: CorrelatorMethod, basis: Option<KernelBasis>) -> Self {
        CorrelatorSample {
            t,
            r,
            i: 1,
            j: 1,
            value,
            method,
            basis,
        }
    }
}

fn check_coordinates(t: f64, r: f64) -> Result<()> {
    if !(t >= 0.0 && r >= 0.0) || !t.is_finite() || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "correlator needs finite t >= 0 and r >= 0 (t = {t}, r = {r})"
        )));
    }
    Ok(())
}

/// `S_11 = -d_t^2 D` by quadrature with the `omega^2` multiplier.
pub fn s11_quadrature(wg: &Waveguide, t: f64, r: f64, spec: &QuadratureSpec) -> Result<CorrelatorSample> {
    check_coordinates(t, r)?;
    let res = theta_integral(wg, t, r, spec, |omega, _| ComplexValue::new(omega * omega, 0.0))?;
    Ok(CorrelatorSample::s11(t, r, res.value, CorrelatorMethod::Quadrature, None))
}

/// Default stencil step: fourth root of the quadrature `abs_tol`, stretched to
/// `1 / omega_c` for slowly varying guides.
pub fn default_fd_step(wg: &Waveguide, spec: &QuadratureSpec) -> f64 {
    spec.abs_tol.powf(0.25) * f64::max(1.0, 1.0 / wg.lowest_cutoff())
}

/// `-[f(t+h) - 2 f(t) + f(t-h)] / h^2`.
pub fn negative_second_difference<F>(f: F, t: f64, h: f64) -> Result<ComplexValue>
where
    F: Fn(f64) -> Result<ComplexValue>,
{
    let (plus, mid, minus) = (f(t + h)?, f(t)?, f(t - h)?);
    Ok(-(plus - mid * 2.0 + minus) / (h * h))
}

/// Central second differences of the quadrature `D` at steps `h`, `2h`, `4h`,
/// with the two Richardson combinations built from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilLevels {
    pub step: f64,
    pub at_h: ComplexValue,
    pub at_2h: ComplexValue,
    pub at_4h: ComplexValue,
}

impl StencilLevels {
    pub fn richardson(&self) -> ComplexValue {
        (self.at_h * 4.0 - self.at_2h) / 3.0
    }

    pub fn richardson_coarse(&self) -> ComplexValue {
        (self.at_2h * 4.0 - self.at_4h) / 3.0
    }
}

pub fn s11_stencil_levels(wg: &Waveguide, t: f64, r: f64, spec: &QuadratureSpec, h: f64) -> Result<StencilLevels> {
    let d = |tt: f64| d_value(wg, tt, r, spec).map(|res| res.value);
    Ok(StencilLevels {
        step: h,
        at_h: negative_second_difference(d, t, h)?,
        at_2h: negative_second_difference(d, t, 2.0 * h)?,
        at_4h: negative_second_difference(d, t, 4.0 * h)?,
    })
}

const RICHARDSON_TOL: f64 = 1e-6;

/// `S_11` as a central second difference of the quadrature propagator.
///
/// `h = None` uses [`default_fd_step`]. The `t - h` stencil point may lie at
/// negative `t`; the integrand is evaluated there directly.
pub fn s11_finite_difference(
    wg: &Waveguide,
    t: f64,
    r: f64,
    spec: &QuadratureSpec,
    h: Option<f64>,
) -> Result<CorrelatorSample> {
    check_coordinates(t, r)?;
    let h = h.unwrap_or_else(|| default_fd_step(wg, spec));
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let levels = s11_stencil_levels(wg, t, r, spec, h)?;
    let fine = levels.richardson();
    let disagreement = (fine - levels.richardson_coarse()).norm();
    let wc = wg.lowest_cutoff();
    if disagreement > RICHARDSON_TOL * fine.norm() + 1e-14 * wc * wc {
        let d = d_value(wg, t, r, spec)?.value.norm();
        let roundoff = 16.0 * f64::EPSILON * d / (h * h);
        if roundoff * 4.0 >= disagreement {
            return Err(Error::StepTooSmall { step: h, disagreement });
        }
        return Err(Error::StepTooLarge { step: h, disagreement });
    }
    Ok(CorrelatorSample::s11(t, r, levels.at_h, CorrelatorMethod::FiniteDifference, None))
}

/// Closed-form `S_11` in the requested variant and basis.
pub fn s11_closed(
    wg: &Waveguide,
    t: f64,
    r: f64,
    variant: ClosedVariant,
    basis: KernelBasis,
    spec: &QuadratureSpec,
    eps_light: f64,
) -> Result<CorrelatorSample> {
    check_coordinates(t, r)?;
    let (regime, root, z) = closed_argument(wg, t, r, eps_light)?;
    let wc = wg.lowest_cutoff();
    let h1 = kernel(basis, 1, z, spec)?;
    let h2 = kernel(basis, 2, z, spec)?;
    let i = ComplexValue::new(0.0, 1.0);

    let value = match variant {
        ClosedVariant::PaperPrinted => {
            let bracket = h1 - h2 * t;
            match regime {
                Regime::Timelike => bracket * (wc / (8.0 * root)),
                _ => i * bracket * (wc / (8.0 * root)),
            }
        }
        ClosedVariant::Rederived => {
            if t != 0.0 && r != 0.0 {
                return Err(Error::FrameRequired { t, r });
            }
            match regime {
                Regime::Timelike => (h1 / z - h2) * (wc * wc / 8.0),
                _ => i * h1 * (wc / (8.0 * r)),
            }
        }
    };
    Ok(CorrelatorSample::s11(t, r, value, variant.method(), Some(basis)))
}

/// General component `S_ij` at transverse offset `x2_offset`, by quadrature.
pub fn s_ij_quadrature(
    wg: &Waveguide,
    t: f64,
    r: f64,
    x2_offset: f64,
    i: usize,
    j: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    check_coordinates(t, r)?;
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::InvalidIndex { i, j });
    }
    let k2 = ComplexValue::new(0.0, wg.lowest_cutoff());
    let res = theta_integral(wg, t, r, spec, |omega, q| {
        let kappa = [ComplexValue::new(0.0, 0.0), k2, ComplexValue::new(-q, 0.0)];
        let mut m = kappa[i - 1] * kappa[j - 1];
        if i == j {
            m += omega * omega;
        }
        m
    })?;
    Ok(CorrelatorSample {
        t,
        r,
        i,
        j,
        value: res.value * phase_factor(wg, x2_offset),
        method: CorrelatorMethod::Quadrature,
        basis: None,
    })
}

/// Constant-free large-interval model in the dimensionless coordinate
/// `u = omega_c * coordinate`: `u^(-1/2) exp(-i u)` timelike,
/// `u^(-3/2) exp(-u)` spacelike.
pub fn s11_asymptotic_model(wg: &Waveguide, regime: Regime, coordinate: f64) -> Result<ComplexValue> {
    if !(coordinate > 0.0) || !coordinate.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "model coordinate must be positive, got {coordinate}"
        )));
    }
    let u = wg.lowest_cutoff() * coordinate;
    match regime {
        Regime::Timelike => Ok(ComplexValue::from_polar(u.powf(-0.5), -u)),
        Regime::Spacelike => Ok(ComplexValue::new(u.powf(-1.5) * (-u).exp(), 0.0)),
        Regime::Lightlike => Err(Error::ModelUndefined),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::propagator::d_evanescent_quadrature;
    use crate::special::{bessel_k, connection_constant};

    fn wg1() -> Waveguide {
        Waveguide::with_cutoff(1.0).unwrap()
    }

    fn wg_half_pi() -> Waveguide {
        Waveguide::new(1.0, 2.0).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
        (a - b).norm() / a.norm().max(b.norm())
    }

    #[test]
    fn origin_value() {
        for wg in [wg1(), wg_half_pi()] {
            let wc = wg.lowest_cutoff();
            let s = s11_quadrature(&wg, 0.0, 0.0, &spec()).unwrap().value;
            assert!(rel(s, ComplexValue::new(wc * wc / 16.0, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn simultaneous_values_are_real_positive() {
        for i in 0..40 {
            let s = s11_quadrature(&wg_half_pi(), 0.0, 0.37 * f64::from(i), &spec()).unwrap().value;
            assert!(s.im == 0.0 && s.re > 0.0);
        }
    }

    #[test]
    fn quadrature_matches_finite_difference() {
        for wg in [wg1(), wg_half_pi()] {
            let wc = wg.lowest_cutoff();
            for &(a, b) in &[(2.0, 0.0), (0.0, 2.0), (3.0, 4.0)] {
                let (t, r) = (a / wc, b / wc);
                let q = s11_quadrature(&wg, t, r, &spec()).unwrap().value;
                let fd = s11_finite_difference(&wg, t, r, &spec(), None).unwrap().value;
                assert!(rel(q, fd) < 1e-6, "({a}, {b}): {}", rel(q, fd));
            }
        }
    }

    #[test]
    fn richardson_improves_second_order_stencil() {
        let wg = wg1();
        let h = default_fd_step(&wg, &spec());
        for &(t, r) in &[(2.0, 0.0), (0.0, 2.0), (3.0, 4.0)] {
            let q = s11_quadrature(&wg, t, r, &spec()).unwrap().value;
            let lv = s11_stencil_levels(&wg, t, r, &spec(), h).unwrap();
            let plain = (lv.at_h - q).norm();
            let extrapolated = (lv.richardson() - q).norm();
            assert!(plain >= 4.0 * extrapolated, "({t}, {r}): {plain:e} vs {extrapolated:e}");
        }
    }

    #[test]
    fn stencil_on_pure_exponential() {
        let omega = 2.5;
        let f = |t: f64| Ok(ComplexValue::from_polar(1.0, -omega * t));
        for &h in &[1e-2, 1e-3] {
            let got = negative_second_difference(f, 0.8, h).unwrap();
            let exact = ComplexValue::from_polar(omega * omega, -omega * 0.8);
            // truncation is omega^2 h^2 / 12 relative
            assert!(rel(got, exact) < omega * omega * h * h / 12.0 * 1.01 + 1e-9);
        }
    }

    #[test]
    fn tiny_step_is_flagged() {
        let err = s11_finite_difference(&wg1(), 2.0, 1.0, &spec(), Some(1e-7)).unwrap_err();
        assert!(matches!(err, Error::StepTooSmall { .. }), "{err:?}");
        let err = s11_finite_difference(&wg1(), 2.0, 1.0, &spec(), Some(0.5)).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }), "{err:?}");
    }

    #[test]
    fn rederived_paper_kernel_matches_in_rest_frame() {
        for wg in [wg1(), wg_half_pi()] {
            let wc = wg.lowest_cutoff();
            for &u in &[0.5, 1.0, 3.0, 8.0, 20.0] {
                let t = u / wc;
                let q = s11_quadrature(&wg, t, 0.0, &spec()).unwrap().value;
                let c = s11_closed(&wg, t, 0.0, ClosedVariant::Rederived, KernelBasis::PaperKernel, &spec(), 0.0)
                    .unwrap()
                    .value;
                assert!((q - c).norm() <= 1e-8 * q.norm().max(wc * wc * 1e-3), "u={u}");
            }
        }
    }

    #[test]
    fn rederived_paper_kernel_misses_boundary_term_at_equal_times() {
        // integration by parts of the cos^2 integrand leaves omega_c / (4 pi r)
        for wg in [wg1(), wg_half_pi()] {
            let wc = wg.lowest_cutoff();
            for &u in &[0.5, 2.0, 5.0, 20.0] {
                let r = u / wc;
                let q = s11_quadrature(&wg, 0.0, r, &spec()).unwrap().value;
                let c = s11_closed(&wg, 0.0, r, ClosedVariant::Rederived, KernelBasis::PaperKernel, &spec(), 0.0)
                    .unwrap()
                    .value;
                let boundary = ComplexValue::new(wc / (4.0 * PI * r), 0.0);
                assert!((q - c - boundary).norm() < 1e-9 * boundary.norm(), "u={u}");
            }
        }
    }

    #[test]
    fn rederived_standard_spacelike_is_k1() {
        let wg = wg_half_pi();
        let wc = wg.lowest_cutoff();
        let r = 6.0 / wc;
        let c = s11_closed(&wg, 0.0, r, ClosedVariant::Rederived, KernelBasis::StandardHankel, &spec(), 0.0)
            .unwrap()
            .value;
        let expected = ComplexValue::new(0.0, wc / (8.0 * r)) * connection_constant(1) * bessel_k(1, wc * r).unwrap();
        assert!(rel(c, expected) < 1e-14);
        // |S11| r^(3/2) e^(omega_c r) levels off at large r
        let scaled = |u: f64| {
            let r = u / wc;
            let v = s11_closed(&wg, 0.0, r, ClosedVariant::Rederived, KernelBasis::StandardHankel, &spec(), 0.0)
                .unwrap()
                .value;
            v.norm() * r.powf(1.5) * u.exp()
        };
        assert!((scaled(200.0) / scaled(400.0) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn printed_versus_rederived() {
        let spec = spec();
        // at t = 0 the printed bracket loses its t H2 term and the two agree
        let wg = wg_half_pi();
        for &r in &[0.7, 2.0, 9.0] {
            for basis in [KernelBasis::StandardHankel, KernelBasis::PaperKernel] {
                let a = s11_closed(&wg, 0.0, r, ClosedVariant::PaperPrinted, basis, &spec, 0.0).unwrap().value;
                let b = s11_closed(&wg, 0.0, r, ClosedVariant::Rederived, basis, &spec, 0.0).unwrap().value;
                assert!(rel(a, b) < 1e-14);
            }
        }
        // in the rest frame they coincide only when omega_c = 1
        let a = s11_closed(&wg1(), 5.0, 0.0, ClosedVariant::PaperPrinted, KernelBasis::StandardHankel, &spec, 0.0)
            .unwrap()
            .value;
        let b = s11_closed(&wg1(), 5.0, 0.0, ClosedVariant::Rederived, KernelBasis::StandardHankel, &spec, 0.0)
            .unwrap()
            .value;
        assert!(rel(a, b) < 1e-13);
        let wc = wg.lowest_cutoff();
        let a = s11_closed(&wg, 5.0 / wc, 0.0, ClosedVariant::PaperPrinted, KernelBasis::StandardHankel, &spec, 0.0)
            .unwrap()
            .value;
        let b = s11_closed(&wg, 5.0 / wc, 0.0, ClosedVariant::Rederived, KernelBasis::StandardHankel, &spec, 0.0)
            .unwrap()
            .value;
        assert!(rel(a, b) > 0.05);
    }

    #[test]
    fn closed_form_errors() {
        let spec = spec();
        assert!(matches!(
            s11_closed(&wg1(), 3.0, 1.0, ClosedVariant::Rederived, KernelBasis::StandardHankel, &spec, 0.0),
            Err(Error::FrameRequired { .. })
        ));
        assert!(matches!(
            s11_closed(&wg1(), 2.0, 2.0, ClosedVariant::PaperPrinted, KernelBasis::StandardHankel, &spec, 0.0),
            Err(Error::LightconeSingular { .. })
        ));
        assert!(matches!(
            s11_closed(&wg1(), 0.0, 0.0, ClosedVariant::Rederived, KernelBasis::PaperKernel, &spec, 0.0),
            Err(Error::LightconeSingular { .. })
        ));
        assert!(s11_closed(&wg1(), 3.0, 1.0, ClosedVariant::PaperPrinted, KernelBasis::StandardHankel, &spec, 0.0).is_ok());
    }

    #[test]
    fn s_ij_reductions() {
        let wg = wg_half_pi();
        let wc = wg.lowest_cutoff();
        for &(t, r) in &[(0.0, 0.0), (1.3, 0.4), (0.2, 2.5)] {
            let s11 = s11_quadrature(&wg, t, r, &spec()).unwrap().value;
            let g11 = s_ij_quadrature(&wg, t, r, 0.0, 1, 1, &spec()).unwrap().value;
            assert!(rel(s11, g11) < 1e-15);
            let g12 = s_ij_quadrature(&wg, t, r, 0.3, 1, 2, &spec()).unwrap().value;
            assert_eq!(g12, ComplexValue::new(0.0, 0.0));
        }
        let s22 = s_ij_quadrature(&wg, 0.0, 0.0, 0.0, 2, 2, &spec()).unwrap().value;
        assert!(rel(s22, ComplexValue::new(-wc * wc / 16.0, 0.0)) < 1e-12);
        assert!(s_ij_quadrature(&wg, 0.0, 0.0, 0.0, 0, 2, &spec()).is_err());
        assert!(s_ij_quadrature(&wg, 0.0, 0.0, 0.0, 1, 4, &spec()).is_err());
    }

    #[test]
    fn s22_against_finite_differences_of_phased_propagator() {
        let wg = wg_half_pi();
        let (t, r, x2) = (0.8, 0.6, 0.25);
        let f = |tt: f64, xx: f64| -> ComplexValue {
            phase_factor(&wg, xx) * crate::propagator::d_value(&wg, tt, r, &spec()).unwrap().value
        };
        let h = 1e-3;
        let dxx = (f(t, x2 + h) - f(t, x2) * 2.0 + f(t, x2 - h)) / (h * h);
        let dtt = (f(t + h, x2) - f(t, x2) * 2.0 + f(t - h, x2)) / (h * h);
        let fd = dxx - dtt;
        let q = s_ij_quadrature(&wg, t, r, x2, 2, 2, &spec()).unwrap().value;
        assert!(rel(q, fd) < 1e-5, "{q} vs {fd}");
    }

    #[test]
    fn s_ij_symmetric() {
        let wg = wg_half_pi();
        for &(t, r, x2) in &[(0.0, 0.5, 0.0), (1.0, 1.0, 0.3), (4.0, 0.2, 1.1)] {
            for i in 1..=3 {
                for j in 1..=3 {
                    let a = s_ij_quadrature(&wg, t, r, x2, i, j, &spec()).unwrap().value;
                    let b = s_ij_quadrature(&wg, t, r, x2, j, i, &spec()).unwrap().value;
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn rest_frame_modulus_bounded() {
        let wg = wg_half_pi();
        let wc = wg.lowest_cutoff();
        for i in 0..50 {
            let s = s11_quadrature(&wg, 0.4 * f64::from(i), 0.0, &spec()).unwrap().value;
            assert!(s.norm() <= wc * wc / 16.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn asymptotic_model_shapes() {
        let wg = wg_half_pi();
        let wc = wg.lowest_cutoff();
        let m = s11_asymptotic_model(&wg, Regime::Timelike, 1.0 / wc).unwrap();
        assert!((m.norm() - 1.0).abs() < 1e-15);
        let r = 3.0;
        let a = s11_asymptotic_model(&wg, Regime::Spacelike, r).unwrap().re;
        let b = s11_asymptotic_model(&wg, Regime::Spacelike, 2.0 * r).unwrap().re;
        assert!((b / a - 2f64.powf(-1.5) * (-wc * r).exp()).abs() < 1e-15);
        let dt = 0.3;
        let p0 = s11_asymptotic_model(&wg, Regime::Timelike, 2.0).unwrap();
        let p1 = s11_asymptotic_model(&wg, Regime::Timelike, 2.0 + dt).unwrap();
        let advance = (p1 / p0).arg();
        assert!((advance + wc * dt).abs() < 1e-14);
        assert_eq!(s11_asymptotic_model(&wg, Regime::Lightlike, 1.0), Err(Error::ModelUndefined));
        assert!(s11_asymptotic_model(&wg, Regime::Timelike, 0.0).is_err());
    }

    #[test]
    fn quadrature_d_and_s11_consistent_at_origin() {
        let d = d_evanescent_quadrature(&wg1(), 0.0, 0.0, &spec()).unwrap().value;
        assert!((d.re - 0.125).abs() < 1e-14);
    }
}
