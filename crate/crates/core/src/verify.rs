//! The verification battery behind `evanescent verify`.
//!
//! Each check records named measurements against tolerances. Artifact
//! tables are measurements only and carry no pass/fail.

use std::f64::consts::FRAC_2_PI;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{compare_methods, compare_with, fit_spacelike_decay, fit_timelike_oscillation, DiscrepancyReport};
use crate::config::{GridSpec, RunConfig};
use crate::correlator::{s11_closed, s11_quadrature, s11_stencil_levels, default_fd_step, ClosedVariant};
use crate::error::{Error, Result};
use crate::evaluate::{EvalContext, Evaluator};
use crate::format::json_number;
use crate::propagator::d_evanescent_quadrature;
use crate::scan::{render_csv, render_json, scan_with_workers, units_metadata};
use crate::special::{
    bessel_k, connection_constant, hankel2, hankel2_asymptotic, hankel2_asymptotic_series, hankel_completion,
    paper_kernel, KernelBasis,
};
use crate::ComplexValue;

pub const SCHEMA: &str = include_str!("../schemas/verify_report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
    /// Reported without a pass/fail judgement.
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "record")]
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub tolerance: Option<f64>,
}

impl Measurement {
    pub fn passes(&self) -> bool {
        match (self.comparison, self.tolerance) {
            (Comparison::AtMost, Some(tol)) => self.value <= tol,
            (Comparison::AtLeast, Some(tol)) => self.value >= tol,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: u32,
    pub name: String,
    pub status: CheckStatus,
    pub measurements: Vec<Measurement>,
    pub error: Option<(String, String)>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass | CheckStatus::Measured)
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// One-line summary, e.g. `PASS  1 propagator_anchor abs_err=0 (<= 1e-10)`.
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Error => "ERROR",
            CheckStatus::Measured => "MEASURED",
        };
        let mut s = format!("{tag} {:>2} {}", self.id, self.name);
        for m in &self.measurements {
            s.push_str(&format!(" {}={:.6e}", m.name, m.value));
            if let Some(tol) = m.tolerance {
                let op = if m.comparison == Comparison::AtLeast { ">=" } else { "<=" };
                s.push_str(&format!(" ({op} {tol:e})"));
            }
        }
        if let Some((code, msg)) = &self.error {
            s.push_str(&format!(" error[{code}]: {msg}"));
        }
        s
    }

    fn to_json(&self, precision: usize) -> Value {
        let ms: Vec<Value> = self
            .measurements
            .iter()
            .map(|m| {
                json!({
                    "name": m.name,
                    "value": json_number(m.value, precision),
                    "comparison": m.comparison,
                    "tolerance": m.tolerance.map(|t| json_number(t, precision)),
                    "pass": if m.comparison == Comparison::Record { Value::Null } else { Value::Bool(m.passes()) },
                })
            })
            .collect();
        json!({
            "id": self.id,
            "name": self.name,
            "status": self.status,
            "measurements": ms,
            "error": self.error.as_ref().map(|(code, msg)| json!({"code": code, "message": msg})),
        })
    }
}

struct Check {
    id: u32,
    name: &'static str,
    measurements: Vec<Measurement>,
    measured_only: bool,
}

impl Check {
    fn new(id: u32, name: &'static str) -> Self {
        Check {
            id,
            name,
            measurements: Vec::new(),
            measured_only: false,
        }
    }

    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, value, Comparison::AtMost, Some(tol));
    }

    fn at_least(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, value, Comparison::AtLeast, Some(tol));
    }

    fn record(&mut self, name: &str, value: f64) {
        self.push(name, value, Comparison::Record, None);
    }

    fn push(&mut self, name: &str, value: f64, comparison: Comparison, tolerance: Option<f64>) {
        self.measurements.push(Measurement {
            name: name.to_string(),
            value,
            comparison,
            tolerance,
        });
    }

    fn finish(self, outcome: Result<()>) -> CheckRecord {
        let (status, error) = match outcome {
            Err(e) => (CheckStatus::Error, Some((e.code().to_string(), e.to_string()))),
            Ok(()) if self.measured_only => (CheckStatus::Measured, None),
            Ok(()) if self.measurements.iter().all(Measurement::passes) => (CheckStatus::Pass, None),
            Ok(()) => (CheckStatus::Fail, None),
        };
        CheckRecord {
            id: self.id,
            name: self.name.to_string(),
            status,
            measurements: self.measurements,
            error,
        }
    }
}

fn run_check(id: u32, name: &'static str, body: impl FnOnce(&mut Check) -> Result<()>) -> CheckRecord {
    let mut check = Check::new(id, name);
    let outcome = body(&mut check);
    check.finish(outcome)
}

fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn real(x: f64) -> ComplexValue {
    ComplexValue::new(x, 0.0)
}

fn scaled_grid(wc: f64, ts: &[f64], rs: &[f64]) -> Vec<(f64, f64)> {
    ts.iter()
        .flat_map(|&t| rs.iter().map(move |&r| (t / wc, r / wc)))
        .collect()
}

/// Off-cone 5x5 grid in units of `1/omega_c`, reaching 19 in either coordinate.
pub fn identity_grid(ctx: &EvalContext) -> Vec<(f64, f64)> {
    scaled_grid(
        ctx.waveguide.lowest_cutoff(),
        &[0.5, 2.0, 5.0, 11.0, 19.0],
        &[0.0, 1.0, 3.5, 8.0, 15.0],
    )
}

/// `{0, 1, 2, 5, 10}^2` in units of `1/omega_c`.
pub fn derivative_grid(ctx: &EvalContext) -> Vec<(f64, f64)> {
    let u = [0.0, 1.0, 2.0, 5.0, 10.0];
    scaled_grid(ctx.waveguide.lowest_cutoff(), &u, &u)
}

pub fn check_propagator_anchor(ctx: &EvalContext) -> CheckRecord {
    run_check(1, "propagator_anchor", |c| {
        let d = d_evanescent_quadrature(&ctx.waveguide, 0.0, 0.0, &ctx.quadrature)?.value;
        c.at_most("abs_err", (d - real(0.125)).norm(), 1e-10);
        Ok(())
    })
}

pub fn check_basis_identity(ctx: &EvalContext) -> CheckRecord {
    run_check(2, "paper_kernel_identity", |c| {
        let rep = compare_methods(
            ctx,
            &identity_grid(ctx),
            &Evaluator::DQuadrature,
            &Evaluator::DClosed(KernelBasis::PaperKernel),
        )?;
        c.at_most("max_rel_diff", rep.max_rel_diff, 1e-8);
        c.record("median_rel_diff", rep.median_rel_diff);
        let on_axis = rep.points.iter().filter(|p| p.t == 0.0 || p.r == 0.0);
        c.record("max_rel_diff_frame_axes", on_axis.map(|p| p.rel_diff).fold(0.0, f64::max));
        Ok(())
    })
}

pub fn check_derivative_consistency(ctx: &EvalContext) -> CheckRecord {
    run_check(3, "derivative_consistency", |c| {
        let (wg, spec) = (&ctx.waveguide, &ctx.quadrature);
        let h = default_fd_step(wg, spec);
        let mut worst = 0.0f64;
        let mut worst_gain = f64::INFINITY;
        for (t, r) in derivative_grid(ctx) {
            let q = s11_quadrature(wg, t, r, spec).map_err(|e| e.at(t, r))?.value;
            let fd = Evaluator::S11FiniteDifference.evaluate(ctx, t, r).map_err(|e| e.at(t, r))?;
            worst = worst.max(rel(q, fd));
            // Richardson over {h, h/2} against the plain h/2 stencil
            let lv = s11_stencil_levels(wg, t, r, spec, 0.5 * h).map_err(|e| e.at(t, r))?;
            let plain = (lv.at_h - q).norm();
            let extrapolated = (lv.richardson() - q).norm();
            let gain = if extrapolated > 0.0 { plain / extrapolated } else { f64::INFINITY };
            worst_gain = worst_gain.min(gain);
        }
        c.at_most("max_rel_diff", worst, 1e-6);
        c.at_least("min_richardson_gain", worst_gain, 4.0);
        c.record("step", h);
        Ok(())
    })
}

pub const RECURRENCE_STEP: f64 = 1e-4;

pub fn check_recurrence(_ctx: &EvalContext) -> CheckRecord {
    run_check(4, "hankel_recurrence", |c| {
        let mut worst = 0.0f64;
        for &z in &[1.0, 5.0, 10.0, 25.0] {
            let h = RECURRENCE_STEP;
            let d = (hankel2(0, real(z + h))? - hankel2(0, real(z - h))?) / (2.0 * h);
            worst = worst.max(rel(d, -hankel2(1, real(z))?));
        }
        c.at_most("max_rel_err", worst, 1e-6);
        Ok(())
    })
}

pub fn check_connection_constant(_ctx: &EvalContext) -> CheckRecord {
    run_check(5, "connection_constant", |c| {
        let ratio = |x: f64| -> Result<ComplexValue> { Ok(hankel2(0, ComplexValue::new(0.0, -x))? / bessel_k(0, x)?) };
        let first = ratio(5.0)?;
        let mut variation = 0.0f64;
        for k in 5..=30 {
            variation = variation.max(rel(ratio(f64::from(k))?, first));
        }
        c.at_most("point_to_point_variation", variation, 1e-6);
        c.at_most("modulus_rel_err", (first.norm() / FRAC_2_PI - 1.0).abs(), 1e-6);
        // independent route: Hankel's expansion on the ray against the K integral
        let mut oracle = 0.0f64;
        for &x in &[10.0, 15.0, 20.0, 25.0, 30.0] {
            let measured = hankel2_asymptotic_series(0, ComplexValue::new(0.0, -x))? / bessel_k(0, x)?;
            oracle = oracle.max(rel(measured, connection_constant(0)));
        }
        c.at_most("asymptotic_oracle_rel_err", oracle, 1e-6);
        Ok(())
    })
}

/// `(r, |S11|)` of the rederived standard closed form at `t = 0`.
pub fn spacelike_samples(ctx: &EvalContext, window: (f64, f64), n: usize) -> Result<Vec<(f64, f64)>> {
    let wc = ctx.waveguide.lowest_cutoff();
    (0..n)
        .map(|k| {
            let u = window.0 + (window.1 - window.0) * k as f64 / (n - 1) as f64;
            let r = u / wc;
            let v = s11_closed(
                &ctx.waveguide,
                0.0,
                r,
                ClosedVariant::Rederived,
                KernelBasis::StandardHankel,
                &ctx.quadrature,
                ctx.eps_light,
            )?;
            Ok((r, v.value.norm()))
        })
        .collect()
}

/// `(t, S11)` of the rederived standard closed form at `r = 0`.
pub fn timelike_samples(ctx: &EvalContext, window: (f64, f64), n: usize) -> Result<Vec<(f64, ComplexValue)>> {
    let wc = ctx.waveguide.lowest_cutoff();
    (0..n)
        .map(|k| {
            let u = window.0 + (window.1 - window.0) * k as f64 / (n - 1) as f64;
            let t = u / wc;
            let v = s11_closed(
                &ctx.waveguide,
                t,
                0.0,
                ClosedVariant::Rederived,
                KernelBasis::StandardHankel,
                &ctx.quadrature,
                ctx.eps_light,
            )?;
            Ok((t, v.value))
        })
        .collect()
}

pub const SPACELIKE_WINDOW: (f64, f64) = (5.0, 30.0);
pub const TIMELIKE_WINDOW: (f64, f64) = (10.0, 60.0);

pub fn check_spacelike_law(ctx: &EvalContext) -> CheckRecord {
    run_check(6, "spacelike_decay_law", |c| {
        let wc = ctx.waveguide.lowest_cutoff();
        let fit = fit_spacelike_decay(&spacelike_samples(ctx, SPACELIKE_WINDOW, 26)?)?;
        c.at_most("rate_rel_err", (fit.rate / wc - 1.0).abs(), 5e-3);
        c.at_most("exponent_abs_err", (fit.exponent + 1.5).abs(), 0.05);
        c.record("rate", fit.rate);
        c.record("exponent", fit.exponent);
        c.record("r_squared", fit.r_squared);
        Ok(())
    })
}

pub fn check_timelike_law(ctx: &EvalContext) -> CheckRecord {
    run_check(7, "timelike_oscillation_law", |c| {
        let wc = ctx.waveguide.lowest_cutoff();
        let fit = fit_timelike_oscillation(&timelike_samples(ctx, TIMELIKE_WINDOW, 1001)?)?;
        c.at_most("frequency_rel_err", (fit.frequency / wc - 1.0).abs(), 1e-2);
        c.at_most("envelope_abs_err", (fit.envelope_exponent + 0.5).abs(), 0.1);
        c.record("frequency", fit.frequency);
        c.record("envelope_exponent", fit.envelope_exponent);
        Ok(())
    })
}

pub fn check_asymptotic_form(_ctx: &EvalContext) -> CheckRecord {
    run_check(8, "hankel_asymptotic_form", |c| {
        let err = |z: ComplexValue| -> Result<f64> { Ok(rel(hankel2_asymptotic(0, z)?, hankel2(0, z)?)) };
        c.at_most("rel_err_real_20", err(real(20.0))?, 1e-2);
        c.at_most("rel_err_ray_20", err(ComplexValue::new(0.0, -20.0))?, 1e-2);
        let seq: Vec<f64> = [5.0, 10.0, 20.0, 40.0].iter().map(|&z| err(real(z))).collect::<Result<_>>()?;
        let violations = seq.windows(2).filter(|w| !(w[1] < w[0])).count();
        c.at_most("monotonicity_violations", violations as f64, 0.0);
        for (z, e) in [5, 10, 20, 40].iter().zip(&seq) {
            c.record(&format!("rel_err_real_{z}"), *e);
        }
        Ok(())
    })
}

fn report_json(rep: &DiscrepancyReport, precision: usize) -> Value {
    let n = |x: f64| json_number(x, precision);
    json!({
        "grid": rep.grid,
        "method_a": rep.method_a,
        "method_b": rep.method_b,
        "max_rel_diff": n(rep.max_rel_diff),
        "median_rel_diff": n(rep.median_rel_diff),
        "points": rep.points.iter().map(|p| json!({
            "t": n(p.t), "r": n(p.r),
            "a_re": n(p.a.re), "a_im": n(p.a.im),
            "b_re": n(p.b.re), "b_im": n(p.b.im),
            "rel_diff": n(p.rel_diff),
        })).collect::<Vec<_>>(),
    })
}

/// Discrepancy tables, all measurements.
pub fn build_artifacts(ctx: &EvalContext, precision: usize) -> Result<Value> {
    let wc = ctx.waveguide.lowest_cutoff();
    let (wg, spec) = (&ctx.waveguide, &ctx.quadrature);
    let n = |x: f64| json_number(x, precision);

    let u = [0.0, 1.0, 5.0, 20.0];
    let grid: Vec<(f64, f64)> = scaled_grid(wc, &u, &u).into_iter().filter(|(t, r)| t != r).collect();
    let propagator = compare_methods(
        ctx,
        &grid,
        &Evaluator::DQuadrature,
        &Evaluator::DClosed(KernelBasis::StandardHankel),
    )?;

    let mut printed = Vec::new();
    for basis in [KernelBasis::StandardHankel, KernelBasis::PaperKernel] {
        for (frame, to_point) in [("r=0", (|z: f64| (z, 0.0)) as fn(f64) -> (f64, f64)), ("t=0", |z| (0.0, z))] {
            let pts: Vec<(f64, f64)> = [1.0, 5.0, 10.0]
                .iter()
                .map(|&z| {
                    let (a, b) = to_point(z);
                    (a / wc, b / wc)
                })
                .collect();
            let eval = |variant| {
                move |t, r| s11_closed(wg, t, r, variant, basis, spec, ctx.eps_light).map(|s| s.value)
            };
            let rep = compare_with(
                &pts,
                "S11:closed_paper_printed",
                eval(ClosedVariant::PaperPrinted),
                "S11:closed_rederived",
                eval(ClosedVariant::Rederived),
            )?;
            let mut v = report_json(&rep, precision);
            v["frame"] = frame.into();
            v["basis"] = basis.as_str().into();
            printed.push(v);
        }
    }

    let mut completion = Vec::new();
    for &z in &[0.5, 1.0, 2.0, 5.0, 10.0] {
        let zc = real(z);
        let sum = paper_kernel(0, zc, spec)? + hankel_completion(zc, spec)?;
        let h = hankel2(0, zc)?;
        completion.push(json!({
            "z": n(z),
            "residual_abs": n((sum - h).norm()),
            "residual_rel": n(rel(sum, h)),
        }));
    }

    let samples: Vec<(f64, f64)> = (0..26)
        .map(|k| {
            let r = (5.0 + f64::from(k)) / wc;
            Ok((r, s11_quadrature(wg, 0.0, r, spec)?.value.norm()))
        })
        .collect::<Result<_>>()?;
    let fit = fit_spacelike_decay(&samples)?;

    Ok(json!({
        "propagator_quadrature_vs_standard_hankel": report_json(&propagator, precision),
        "s11_printed_vs_rederived": printed,
        "completion_residuals": completion,
        "s11_quadrature_spacelike_fit": {
            "evaluator": "S11:quadrature",
            "window_omega_c_r": [n(5.0), n(30.0)],
            "amplitude": n(fit.amplitude),
            "rate": n(fit.rate),
            "rate_over_omega_c": n(fit.rate / wc),
            "exponent": n(fit.exponent),
            "r_squared": n(fit.r_squared),
        },
    }))
}

pub fn check_artifacts(ctx: &EvalContext, precision: usize) -> (CheckRecord, Value) {
    let mut artifacts = Value::Null;
    let rec = run_check(9, "discrepancy_artifacts", |c| {
        c.measured_only = true;
        artifacts = build_artifacts(ctx, precision)?;
        let max = artifacts["propagator_quadrature_vs_standard_hankel"]["max_rel_diff"]
            .as_f64()
            .unwrap_or(f64::NAN);
        c.record("propagator_max_rel_diff", max);
        Ok(())
    });
    (rec, artifacts)
}

pub fn check_synthetic_fits(_ctx: &EvalContext) -> CheckRecord {
    run_check(10, "synthetic_fit_round_trip", |c| {
        let a = 2.5;
        let samples: Vec<(f64, f64)> = (5..=20)
            .map(|k| {
                let r = f64::from(k);
                (r, a * r.powf(-1.5) * (-2.0 * r).exp())
            })
            .collect();
        let fit = fit_spacelike_decay(&samples)?;
        let worst = [(fit.amplitude / a - 1.0).abs(), (fit.rate / 2.0 - 1.0).abs(), (fit.exponent / -1.5 - 1.0).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        c.at_most("decay_max_rel_err", worst, 1e-9);
        let wave: Vec<(f64, ComplexValue)> = (0..2001)
            .map(|k| {
                let t = 10.0 + 40.0 * f64::from(k) / 2000.0;
                (t, ComplexValue::from_polar(t.powf(-0.5), -3.0 * t))
            })
            .collect();
        let osc = fit_timelike_oscillation(&wave)?;
        c.at_most("frequency_rel_err", (osc.frequency / 3.0 - 1.0).abs(), 5e-3);
        Ok(())
    })
}

/// Renders the scan for each worker count and compares the bytes.
pub fn check_determinism(ctx: &EvalContext, grid: &GridSpec, precision: usize) -> CheckRecord {
    run_check(11, "scan_determinism", |c| {
        let points = grid.points();
        let ev = Evaluator::DQuadrature;
        let mut outputs = Vec::new();
        for workers in [1, 4, 4] {
            let rows = scan_with_workers(ctx, &points, &ev, Some(workers)).map_err(Error::InvalidArgument)?;
            outputs.push((render_csv(&rows, &ev, precision), render_json(&rows, &ev, ctx, precision)));
        }
        let mismatches = outputs.windows(2).filter(|w| w[0] != w[1]).count();
        c.at_most("mismatched_runs", mismatches as f64, 0.0);
        c.record("rows", points.len() as f64);
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckRecord>,
    pub artifacts: Value,
    pub json: Value,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }
}

pub fn run_verify(cfg: &RunConfig) -> VerifyReport {
    let ctx = cfg.context();
    let p = cfg.precision;
    let (artifact_check, artifacts) = check_artifacts(&ctx, p);
    let checks = vec![
        check_propagator_anchor(&ctx),
        check_basis_identity(&ctx),
        check_derivative_consistency(&ctx),
        check_recurrence(&ctx),
        check_connection_constant(&ctx),
        check_spacelike_law(&ctx),
        check_timelike_law(&ctx),
        check_asymptotic_form(&ctx),
        artifact_check,
        check_synthetic_fits(&ctx),
        check_determinism(&ctx, &cfg.grid, p),
    ];
    let count = |s: CheckStatus| checks.iter().filter(|c| c.status == s).count();
    let spec = &cfg.quadrature;
    let json = json!({
        "schema_version": 1,
        "units": units_metadata(&ctx, p),
        "quadrature": {
            "abs_tol": json_number(spec.abs_tol, p),
            "rel_tol": json_number(spec.rel_tol, p),
            "max_subdivisions": spec.max_subdivisions,
            "tail_bound_tol": json_number(spec.tail_bound_tol, p),
        },
        "checks": checks.iter().map(|c| c.to_json(p)).collect::<Vec<_>>(),
        "artifacts": artifacts,
        "summary": {
            "passed": count(CheckStatus::Pass),
            "failed": count(CheckStatus::Fail),
            "errors": count(CheckStatus::Error),
            "measured": count(CheckStatus::Measured),
            "all_passed": checks.iter().all(CheckRecord::passed),
        },
    });
    VerifyReport { checks, artifacts: json["artifacts"].clone(), json }
}
