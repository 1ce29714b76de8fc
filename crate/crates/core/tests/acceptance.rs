//! Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

use std::process::Command;

use evanescent::config::RunConfig;
use evanescent::evaluate::EvalContext;
use evanescent::verify::{self, CheckRecord, CheckStatus};

fn ctx() -> EvalContext {
    RunConfig::default().context()
}

fn report(criterion: u32, rec: &CheckRecord) {
    println!("criterion {criterion:>2}: {}", rec.summary_line());
    assert_eq!(rec.status, CheckStatus::Pass, "{}", rec.summary_line());
}

#[test]
fn criterion_01_propagator_anchor() {
    report(1, &verify::check_propagator_anchor(&ctx()));
}

#[test]
fn criterion_02_paper_kernel_identity_on_off_cone_grid() {
    report(2, &verify::check_basis_identity(&ctx()));
}

#[test]
fn criterion_03_derivative_consistency() {
    report(3, &verify::check_derivative_consistency(&ctx()));
}

#[test]
fn criterion_04_hankel_recurrence() {
    report(4, &verify::check_recurrence(&ctx()));
}

#[test]
fn criterion_05_connection_constant() {
    report(5, &verify::check_connection_constant(&ctx()));
}

#[test]
fn criterion_06_spacelike_decay_law() {
    report(6, &verify::check_spacelike_law(&ctx()));
}

#[test]
fn criterion_07_timelike_oscillation_law() {
    report(7, &verify::check_timelike_law(&ctx()));
}

#[test]
fn criterion_08_hankel_asymptotic_form() {
    report(8, &verify::check_asymptotic_form(&ctx()));
}

#[test]
fn criterion_09_discrepancy_artifacts_are_schema_valid() {
    let rep = verify::run_verify(&RunConfig::default());
    let c9 = &rep.checks[8];
    assert_eq!(c9.id, 9);
    let schema: serde_json::Value = serde_json::from_str(verify::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let round_trip: serde_json::Value =
        serde_json::from_str(&serde_json::to_string_pretty(&rep.json).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&round_trip).map(|e| e.to_string()).collect();
    let ok = c9.status == CheckStatus::Measured && errors.is_empty() && !rep.artifacts.is_null();
    println!(
        "criterion  9: {} artifacts produced={} schema_errors={}",
        if ok { "PASS" } else { "FAIL" },
        !rep.artifacts.is_null(),
        errors.len()
    );
    assert!(ok, "{errors:?} {}", c9.summary_line());
}

#[test]
fn criterion_10_synthetic_fit_round_trips() {
    report(10, &verify::check_synthetic_fits(&ctx()));
}

fn scan_output(workers: &str, format: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_evanescent"))
        .args(["scan", "--quantity", "S11", "--grid", "0:12:25,0:6:13", "--format", format])
        .env("EVANESCENT_WORKERS", workers)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn criterion_11_scan_determinism_across_worker_counts() {
    let mut identical = true;
    for format in ["csv", "json"] {
        let base = scan_output("1", format);
        for workers in ["1", "2", "4", "8"] {
            identical &= scan_output(workers, format) == base;
        }
    }
    let lib = verify::check_determinism(&ctx(), &RunConfig::default().grid, 17);
    println!(
        "criterion 11: {} cli_identical={identical}; {}",
        if identical && lib.status == CheckStatus::Pass { "PASS" } else { "FAIL" },
        lib.summary_line()
    );
    assert!(identical);
    assert_eq!(lib.status, CheckStatus::Pass);
}
