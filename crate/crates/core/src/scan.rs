//! Grid scans, evaluated in parallel and emitted in row-major order.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Error;
use crate::evaluate::{EvalContext, Evaluator};
use crate::format::{format_sig, json_number};
use crate::geometry::{classify_interval, Regime};
use crate::ComplexValue;

pub const WORKERS_ENV: &str = "EVANESCENT_WORKERS";
pub const CSV_HEADER: &str = "t,r,regime,re,im,method,basis";

#[derive(Debug, Clone, PartialEq)]
pub enum RowValue {
    Value(ComplexValue),
    /// Closed form evaluated on the light cone.
    Singular,
    Failed(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub r: f64,
    pub regime: Regime,
    pub value: RowValue,
}

impl ScanRow {
    pub fn failed(&self) -> bool {
        matches!(self.value, RowValue::Failed(_))
    }
}

fn evaluate_row(ctx: &EvalContext, ev: &Evaluator, t: f64, r: f64) -> ScanRow {
    let regime = classify_interval(t, r, ctx.eps_light);
    let value = match ev.evaluate(ctx, t, r) {
        Ok(v) => RowValue::Value(v),
        Err(e) if ev.is_closed() && matches!(e.root(), Error::LightconeSingular { .. }) => RowValue::Singular,
        Err(e) => RowValue::Failed(e),
    };
    ScanRow { t, r, regime, value }
}

/// Evaluates every grid point on the current rayon pool.
pub fn scan(ctx: &EvalContext, grid: &[(f64, f64)], ev: &Evaluator) -> Vec<ScanRow> {
    grid.par_iter().map(|&(t, r)| evaluate_row(ctx, ev, t, r)).collect()
}

/// [`scan`] on a dedicated pool of `workers` threads (rayon's default when `None`).
pub fn scan_with_workers(
    ctx: &EvalContext,
    grid: &[(f64, f64)],
    ev: &Evaluator,
    workers: Option<usize>,
) -> Result<Vec<ScanRow>, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| format!("cannot start worker pool: {e}"))?;
    Ok(pool.install(|| scan(ctx, grid, ev)))
}

/// Worker count from the environment; unset or empty means the default.
pub fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")),
        },
        Err(_) => Ok(None),
    }
}

fn basis_label(ev: &Evaluator) -> &'static str {
    ev.basis().map(|b| b.as_str()).unwrap_or("none")
}

pub fn render_csv(rows: &[ScanRow], ev: &Evaluator, precision: usize) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let (re, im) = match &row.value {
            RowValue::Value(v) => (format_sig(v.re, precision), format_sig(v.im, precision)),
            RowValue::Singular => ("singular".to_string(), "singular".to_string()),
            RowValue::Failed(e) => ("error".to_string(), e.code().to_string()),
        };
        out.push_str(&format!(
            "{},{},{},{re},{im},{},{}\n",
            format_sig(row.t, precision),
            format_sig(row.r, precision),
            row.regime.as_str(),
            ev.method_label(),
            basis_label(ev),
        ));
    }
    out
}

pub fn units_metadata(ctx: &EvalContext, precision: usize) -> Value {
    let wg = &ctx.waveguide;
    json!({
        "convention": "natural units, hbar = c = 1",
        "lengths": "t, r, b1, b2 share one unit; frequencies are inverse lengths",
        "dimensionless": "omega_c_t = omega_c * t, omega_c_r = omega_c * r",
        "b1": json_number(wg.b1(), precision),
        "b2": json_number(wg.b2(), precision),
        "omega_c": json_number(wg.lowest_cutoff(), precision),
    })
}

pub fn render_json(rows: &[ScanRow], ev: &Evaluator, ctx: &EvalContext, precision: usize) -> String {
    let wc = ctx.waveguide.lowest_cutoff();
    let records: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut rec = json!({
                "t": json_number(row.t, precision),
                "r": json_number(row.r, precision),
                "omega_c_t": json_number(wc * row.t, precision),
                "omega_c_r": json_number(wc * row.r, precision),
                "regime": row.regime.as_str(),
                "method": ev.method_label(),
                "basis": basis_label(ev),
            });
            let obj = rec.as_object_mut().expect("object literal");
            match &row.value {
                RowValue::Value(v) => {
                    obj.insert("status".into(), "ok".into());
                    obj.insert("re".into(), json_number(v.re, precision));
                    obj.insert("im".into(), json_number(v.im, precision));
                }
                RowValue::Singular => {
                    obj.insert("status".into(), "singular".into());
                }
                RowValue::Failed(e) => {
                    obj.insert("status".into(), "error".into());
                    obj.insert("error".into(), e.code().into());
                    obj.insert("message".into(), e.to_string().into());
                }
            }
            rec
        })
        .collect();
    let doc = json!({
        "quantity": ev.quantity().as_str(),
        "evaluator": ev.to_string(),
        "units": units_metadata(ctx, precision),
        "rows": records,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
    s.push('\n');
    s
}
