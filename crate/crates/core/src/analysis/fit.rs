use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ComplexValue;

/// `modulus ~ amplitude * r^exponent * exp(-rate * r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub rate: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Oscillation frequency and power-law envelope of a complex signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationFit {
    pub frequency: f64,
    pub envelope_exponent: f64,
    pub n_zero_crossings: usize,
    pub window: (f64, f64),
}

/// Least squares of `y` on the given basis functions of `x`, solved by SVD
/// on norm-scaled columns. Returns the coefficients and `R^2`.
pub fn log_linear_fit(x: &[f64], y: &[f64], basis: &[fn(f64) -> f64]) -> Result<(Vec<f64>, f64)> {
    let (n, k) = (x.len(), basis.len());
    if n != y.len() {
        return Err(Error::InvalidArgument(format!("{n} abscissae but {} ordinates", y.len())));
    }
    if n < k {
        return Err(Error::InsufficientData(format!("{n} points for {k} parameters")));
    }
    let mut a = DMatrix::from_fn(n, k, |i, j| basis[j](x[i]));
    let mut scale = vec![1.0; k];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm > 0.0 {
            *s = norm;
            a.column_mut(j).unscale_mut(norm);
        }
    }
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InsufficientData(format!("least-squares solve failed: {e}")))?;
    let coeffs: Vec<f64> = sol.iter().zip(&scale).map(|(c, s)| c / s).collect();

    let resid = &b - &a * &sol;
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res = resid.norm_squared();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok((coeffs, r_squared))
}

/// Fits `ln|S| = ln A - rate r + exponent ln r` to `(r, modulus)` samples.
pub fn fit_spacelike_decay(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidArgument(format!(
                "r must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
    }
    if !(samples[0].0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs r > 0, got {}",
            samples[0].0
        )));
    }
    for &(r, m) in samples {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveModulus { at: r, modulus: m });
        }
    }
    let x: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (c, r_squared) = log_linear_fit(&x, &y, &[|_| 1.0, |r| r, f64::ln])?;
    Ok(DecayFit {
        amplitude: c[0].exp(),
        rate: -c[1],
        exponent: c[2],
        r_squared,
        window: (x[0], x[x.len() - 1]),
        n_points: samples.len(),
    })
}

fn zero_crossings(samples: &[(f64, ComplexValue)]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..samples.len() - 1 {
        let (t0, v0) = (samples[k].0, samples[k].1.re);
        let (t1, v1) = (samples[k + 1].0, samples[k + 1].1.re);
        if v0 * v1 < 0.0 {
            out.push(t0 - v0 * (t1 - t0) / (v1 - v0));
        } else if v1 == 0.0 && v0 != 0.0 && k + 2 < samples.len() && v0 * samples[k + 2].1.re < 0.0 {
            out.push(t1);
        }
    }
    out
}

/// Frequency from the mean spacing of real-part zero crossings, envelope
/// exponent from `ln|S|` against `ln t`.
///
/// Needs at least 16 samples on a uniform grid covering at least 5 periods.
pub fn fit_timelike_oscillation(samples: &[(f64, ComplexValue)]) -> Result<OscillationFit> {
    let n = samples.len();
    if n < 16 {
        return Err(Error::InsufficientData(format!(
            "oscillation fit needs at least 16 samples, got {n}"
        )));
    }
    let span = samples[n - 1].0 - samples[0].0;
    let step = span / (n - 1) as f64;
    if !(step > 0.0) || samples.windows(2).any(|w| ((w[1].0 - w[0].0) - step).abs() > 1e-6 * step) {
        return Err(Error::InvalidArgument("oscillation fit needs a uniform increasing t grid".into()));
    }
    if !(samples[0].0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oscillation fit needs t > 0, got {}",
            samples[0].0
        )));
    }

    let crossings = zero_crossings(samples);
    if crossings.len() < 4 {
        return Err(Error::NoOscillationDetected {
            crossings: crossings.len(),
        });
    }
    let spacing = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    let frequency = std::f64::consts::PI / spacing;
    let periods = frequency * span / std::f64::consts::TAU;
    if periods < 5.0 {
        return Err(Error::InsufficientData(format!(
            "window covers {periods:.2} periods, need at least 5"
        )));
    }

    // demodulating by exp(i frequency t) leaves the modulus unchanged
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for &(t, v) in samples {
        let m = v.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveModulus { at: t, modulus: m });
        }
        x.push(t.ln());
        y.push(m.ln());
    }
    let (c, _) = log_linear_fit(&x, &y, &[|_| 1.0, |u| u])?;
    Ok(OscillationFit {
        frequency,
        envelope_exponent: c[1],
        n_zero_crossings: crossings.len(),
        window: (samples[0].0, samples[n - 1].0),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn synthetic_decay(a: f64, p: f64, lambda: f64, rs: impl Iterator<Item = f64>) -> Vec<(f64, f64)> {
        rs.map(|r| (r, a * r.powf(p) * (-lambda * r).exp())).collect()
    }

    fn synthetic_wave(omega: f64, t0: f64, t1: f64, n: usize) -> Vec<(f64, ComplexValue)> {
        (0..n)
            .map(|k| {
                let t = t0 + (t1 - t0) * k as f64 / (n - 1) as f64;
                (t, ComplexValue::from_polar(t.powf(-0.5), -omega * t))
            })
            .collect()
    }

    #[test]
    fn decay_round_trip() {
        let s = synthetic_decay(1.0, -1.5, 2.0, (5..=20).map(f64::from));
        let fit = fit_spacelike_decay(&s).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-10);
        assert!((fit.exponent + 1.5).abs() < 1e-9);
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.window, (5.0, 20.0));
        assert_eq!(fit.n_points, 16);
    }

    #[test]
    fn decay_errors() {
        let s = synthetic_decay(1.0, -1.5, 2.0, (5..=7).map(f64::from));
        assert!(matches!(fit_spacelike_decay(&s), Err(Error::InsufficientData(_))));
        let mut s = synthetic_decay(1.0, -1.5, 2.0, (5..=10).map(f64::from));
        s[3].1 = 0.0;
        assert!(matches!(fit_spacelike_decay(&s), Err(Error::NonPositiveModulus { at, .. }) if at == 8.0));
        s[3].1 = 1.0;
        s.swap(1, 2);
        assert!(fit_spacelike_decay(&s).is_err());
    }

    #[test]
    fn oscillation_round_trip() {
        let fit = fit_timelike_oscillation(&synthetic_wave(3.0, 10.0, 50.0, 2001)).unwrap();
        assert!((fit.frequency / 3.0 - 1.0).abs() < 5e-3);
        assert!((fit.envelope_exponent + 0.5).abs() < 0.05);
        assert!(fit.n_zero_crossings >= 4);
    }

    #[test]
    fn constant_signal_has_no_oscillation() {
        let s: Vec<_> = (0..40).map(|k| (1.0 + f64::from(k), ComplexValue::new(2.0, 0.0))).collect();
        assert!(matches!(
            fit_timelike_oscillation(&s),
            Err(Error::NoOscillationDetected { crossings: 0 })
        ));
    }

    #[test]
    fn oscillation_preconditions() {
        assert!(matches!(
            fit_timelike_oscillation(&synthetic_wave(3.0, 10.0, 50.0, 15)),
            Err(Error::InsufficientData(_))
        ));
        // two periods only
        assert!(matches!(
            fit_timelike_oscillation(&synthetic_wave(3.0, 10.0, 10.0 + 4.0 * std::f64::consts::PI / 3.0, 200)),
            Err(Error::InsufficientData(_))
        ));
        let mut s = synthetic_wave(3.0, 10.0, 50.0, 200);
        s[10].0 += 0.05;
        assert!(matches!(fit_timelike_oscillation(&s), Err(Error::InvalidArgument(_))));
    }

    proptest! {
        #[test]
        fn decay_fit_scale_equivariant(c in 1e-6f64..1e6, lambda in 0.2f64..3.0, p in -3.0f64..1.0) {
            let s = synthetic_decay(1.0, p, lambda, (0..26).map(|k| 5.0 + f64::from(k)));
            let scaled: Vec<_> = s.iter().map(|&(r, m)| (r, c * m)).collect();
            let a = fit_spacelike_decay(&s).unwrap();
            let b = fit_spacelike_decay(&scaled).unwrap();
            prop_assert!((a.rate - b.rate).abs() <= 1e-12 * a.rate.abs().max(1.0));
            prop_assert!((a.exponent - b.exponent).abs() <= 1e-12 * a.exponent.abs().max(1.0));
            prop_assert!((b.amplitude / a.amplitude / c - 1.0).abs() < 1e-9);
        }

        #[test]
        fn oscillation_frequency_phase_invariant(phase in 0.0f64..std::f64::consts::TAU) {
            // a rotated signal has its own crossings, but the same spacing law
            let s = synthetic_wave(3.0, 10.0, 50.0, 2001);
            let rotated: Vec<_> = s.iter().map(|&(t, v)| (t, v * ComplexValue::from_polar(1.0, phase))).collect();
            let a = fit_timelike_oscillation(&s).unwrap();
            let b = fit_timelike_oscillation(&rotated).unwrap();
            prop_assert!((a.frequency - b.frequency).abs() < 5e-3 * a.frequency);
            prop_assert!((a.envelope_exponent - b.envelope_exponent).abs() < 1e-12);
        }

        #[test]
        fn noiseless_fits_keep_nine_digits(a in 0.1f64..10.0, lambda in 0.5f64..3.0, p in -2.5f64..0.5) {
            let s = synthetic_decay(a, p, lambda, (0..16).map(|k| 5.0 + f64::from(k)));
            let fit = fit_spacelike_decay(&s).unwrap();
            prop_assert!((fit.rate / lambda - 1.0).abs() < 1e-9);
            prop_assert!((fit.exponent - p).abs() < 1e-9 * p.abs().max(1.0));
            prop_assert!((fit.amplitude / a - 1.0).abs() < 1e-9);
        }
    }
}
