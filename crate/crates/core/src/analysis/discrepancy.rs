use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{EvalContext, Evaluator};
use crate::ComplexValue;

const REL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDiff {
    pub t: f64,
    pub r: f64,
    pub a: ComplexValue,
    pub b: ComplexValue,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub grid: String,
    pub method_a: String,
    pub method_b: String,
    pub points: Vec<PointDiff>,
    pub max_rel_diff: f64,
    pub median_rel_diff: f64,
}

impl DiscrepancyReport {
    /// `(max, median)` recomputed from the per-point list.
    pub fn recompute_stats(points: &[PointDiff]) -> (f64, f64) {
        let mut d: Vec<f64> = points.iter().map(|p| p.rel_diff).collect();
        d.sort_by(f64::total_cmp);
        let n = d.len();
        if n == 0 {
            return (f64::NAN, f64::NAN);
        }
        let median = if n % 2 == 1 { d[n / 2] } else { 0.5 * (d[n / 2 - 1] + d[n / 2]) };
        (d[n - 1], median)
    }
}

pub fn relative_difference(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(REL_FLOOR)
}

fn describe(grid: &[(f64, f64)]) -> String {
    let (mut t0, mut t1, mut r0, mut r1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, r) in grid {
        t0 = t0.min(t);
        t1 = t1.max(t);
        r0 = r0.min(r);
        r1 = r1.max(r);
    }
    format!("{} points, t in [{t0}, {t1}], r in [{r0}, {r1}]", grid.len())
}

/// Compares two arbitrary evaluators point by point.
pub fn compare_with<A, B>(
    grid: &[(f64, f64)],
    label_a: &str,
    eval_a: A,
    label_b: &str,
    eval_b: B,
) -> Result<DiscrepancyReport>
where
    A: Fn(f64, f64) -> Result<ComplexValue> + Sync,
    B: Fn(f64, f64) -> Result<ComplexValue> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InsufficientData("comparison grid is empty".into()));
    }
    let points = grid
        .par_iter()
        .map(|&(t, r)| {
            let a = eval_a(t, r).map_err(|e| e.at(t, r))?;
            let b = eval_b(t, r).map_err(|e| e.at(t, r))?;
            Ok(PointDiff {
                t,
                r,
                a,
                b,
                rel_diff: relative_difference(a, b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_rel_diff, median_rel_diff) = DiscrepancyReport::recompute_stats(&points);
    Ok(DiscrepancyReport {
        grid: describe(grid),
        method_a: label_a.to_string(),
        method_b: label_b.to_string(),
        points,
        max_rel_diff,
        median_rel_diff,
    })
}

pub fn compare_methods(
    ctx: &EvalContext,
    grid: &[(f64, f64)],
    method_a: &Evaluator,
    method_b: &Evaluator,
) -> Result<DiscrepancyReport> {
    compare_with(
        grid,
        &method_a.to_string(),
        |t, r| method_a.evaluate(ctx, t, r),
        &method_b.to_string(),
        |t, r| method_b.evaluate(ctx, t, r),
    )
}
