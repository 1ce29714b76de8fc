//! Adaptive Gauss-Kronrod integration of complex-valued integrands.
//!
//! Real and imaginary parts share one subdivision tree and one error
//! estimate, so the phase of the result is resolved as a whole.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ComplexValue;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half); odd entries are
// the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_TAIL_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Bound on the neglected tail of a semi-infinite integral.
    pub tail_bound_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 10_000,
            tail_bound_tol: 1e-14,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize, tail_bound_tol: f64) -> Result<Self> {
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            tail_bound_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_unit(self.abs_tol) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "abs_tol must lie in (0, 1), got {}",
                self.abs_tol
            )));
        }
        if !in_unit(self.rel_tol) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 || self.max_subdivisions > 1_000_000 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "max_subdivisions must lie in 1..=1000000, got {}",
                self.max_subdivisions
            )));
        }
        if !(self.tail_bound_tol > 0.0 && self.tail_bound_tol.is_finite()) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "tail_bound_tol must be positive, got {}",
                self.tail_bound_tol
            )));
        }
        Ok(())
    }

    fn target(&self, value: ComplexValue) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }

    /// Same spec with both tolerances tightened by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: ComplexValue,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: ComplexValue,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> ComplexValue,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * w;
        abs_sum += (f1.norm() + f2.norm()) * w;
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }

    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let raw = ((kronrod - gauss) * half).norm();
    let floor = 50.0 * f64::EPSILON * abs_value;

    Segment {
        a,
        b,
        value,
        error: raw.max(floor),
    }
}

fn adaptive<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> QuadratureResult
where
    F: Fn(f64) -> ComplexValue,
{
    let first = kronrod15(f, a, b);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while error > spec.target(value) && heap.len() < spec.max_subdivisions {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running totals.
    let (mut value, mut error) = (ComplexValue::new(0.0, 0.0), 0.0);
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    for s in &segments {
        value += s.value;
        error += s.error;
    }

    QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= spec.target(value),
    }
}

fn into_result(res: QuadratureResult, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if res.converged {
        Ok(res)
    } else {
        Err(Error::QuadratureFailure {
            value: res.value,
            error_estimate: res.error_estimate,
            subdivisions: spec.max_subdivisions,
        })
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexValue,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy a < b (a = {a}, b = {b})"
        )));
    }
    into_result(adaptive(&f, a, b, spec), spec)
}

/// Integrate `f` over `[a, inf)` for integrands that eventually decay
/// exponentially.
///
/// The cutoff `U` is grown by doubling `U - a` until a local exponential
/// tail bound `|f(U)| / c` drops below `tail_bound_tol`; the result is then
/// confirmed by doubling once more and checking that the added piece is
/// within tolerance.
pub fn integrate_semi_infinite<F>(f: F, a: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexValue,
{
    spec.validate()?;
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!("lower bound must be finite, got {a}")));
    }

    let mut width = 1.0;
    let mut doublings = 0;
    loop {
        let u = a + width;
        let fu = f(u).norm();
        let probe = 0.125 * width;
        let fp = f(u - probe).norm();
        if fu == 0.0 && fp == 0.0 {
            break;
        }
        if fu.is_finite() && fu < fp {
            let rate = (fp / fu).ln() / probe;
            if fu / rate < spec.tail_bound_tol {
                break;
            }
        }
        doublings += 1;
        if doublings > MAX_TAIL_DOUBLINGS {
            return Err(Error::TailNotDecaying { cutoff: u });
        }
        width *= 2.0;
    }

    let mut cutoff = a + width;
    let mut total = adaptive(&f, a, cutoff, spec);
    let mut evaluations = total.evaluations;
    let mut strikes = 0;
    loop {
        let next = a + 2.0 * (cutoff - a);
        let piece = adaptive(&f, cutoff, next, spec);
        evaluations += piece.evaluations;
        let value = total.value + piece.value;
        let error = total.error_estimate + piece.error_estimate;
        let changed = piece.value.norm() > spec.tail_bound_tol + piece.error_estimate;
        total = QuadratureResult {
            value,
            error_estimate: error,
            evaluations,
            converged: total.converged && piece.converged,
        };
        cutoff = next;
        if !changed {
            break;
        }
        strikes += 1;
        if strikes >= 2 {
            return Err(Error::TailNotDecaying { cutoff });
        }
    }
    total.converged = total.converged && total.error_estimate <= spec.target(total.value);
    into_result(total, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64) -> ComplexValue {
        ComplexValue::new(re, 0.0)
    }

    #[test]
    fn constant_on_quarter_period() {
        let res = integrate_finite(|_| c(1.0), 0.0, FRAC_PI_2, &QuadratureSpec::default()).unwrap();
        assert!((res.value - c(FRAC_PI_2)).norm() < 1e-14);
        assert!(res.converged);
    }

    #[test]
    fn complex_exponential() {
        let res = integrate_finite(|x| ComplexValue::new(0.0, x).exp(), 0.0, PI, &QuadratureSpec::default()).unwrap();
        assert!((res.value - ComplexValue::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn endpoint_singular_stress() {
        let b = 1.0 - 1e-12;
        let res = integrate_finite(|x| c(0.5 / (1.0 - x * x).sqrt()), 0.0, b, &QuadratureSpec::default()).unwrap();
        let exact = 0.5 * b.asin();
        assert!((res.value.re - exact).abs() <= 1e-9, "{} vs {}", res.value.re, exact);
        assert!((res.value.re - PI / 4.0).abs() < 1e-6);
    }

    #[test]
    fn exhausting_subdivisions_carries_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 2,
            ..QuadratureSpec::default()
        };
        let err = integrate_finite(|x| c((50.0 * x).sin().abs()), 0.0, 10.0, &spec).unwrap_err();
        match err {
            Error::QuadratureFailure { value, error_estimate, .. } => {
                assert!(value.re.is_finite());
                assert!(error_estimate > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_bounds_and_specs() {
        let spec = QuadratureSpec::default();
        assert!(integrate_finite(|_| c(1.0), 1.0, 1.0, &spec).is_err());
        assert!(QuadratureSpec::new(0.0, 1e-10, 10, 1e-14).is_err());
        assert!(QuadratureSpec::new(1e-12, 1.0, 10, 1e-14).is_err());
        assert!(QuadratureSpec::new(1e-12, 1e-10, 2_000_000, 1e-14).is_err());
        assert!(QuadratureSpec::new(1e-12, 1e-10, 10, 0.0).is_err());
    }

    #[test]
    fn semi_infinite_examples() {
        let spec = QuadratureSpec::default();
        let e = integrate_semi_infinite(|u| c((-u).exp()), 0.0, &spec).unwrap();
        assert!((e.value.re - 1.0).abs() < 1e-12);
        let g = integrate_semi_infinite(|u| c(u * (-u * u).exp()), 0.0, &spec).unwrap();
        assert!((g.value.re - 0.5).abs() < 1e-12);
        // K0(1), frozen from an independent evaluation of the Bessel series
        let k = integrate_semi_infinite(|u| c((-u.cosh()).exp()), 0.0, &spec).unwrap();
        assert!((k.value.re - 0.421_024_438_240_708_3).abs() < 1e-12);
    }

    #[test]
    fn slowly_decaying_tail_is_rejected() {
        let err = integrate_semi_infinite(|u| c(1.0 / (1.0 + u)), 0.0, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::TailNotDecaying { .. }), "{err:?}");
    }
}
