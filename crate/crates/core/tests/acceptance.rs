use std::time::{Duration, Instant};

use mldokit::suites::{self, CheckReport};

fn run(check: suites::Check, budget: Duration) -> CheckReport {
    let start = Instant::now();
    let report = check();
    let elapsed = start.elapsed();
    println!("{report} [{:.2}s]", elapsed.as_secs_f64());
    for line in &report.detail {
        println!("    {line}");
    }
    if elapsed > budget {
        println!("    note: exceeded the {}s budget", budget.as_secs());
    }
    report
}

fn gate(check: suites::Check, secs: u64) {
    let report = run(check, Duration::from_secs(secs));
    assert!(
        report.passed,
        "criterion {} failed: {}",
        report.id,
        report.counterexample.unwrap_or_default()
    );
}

#[test]
fn criterion_01_sl2_relations() {
    gate(suites::sl2_relations, 5);
}

#[test]
fn criterion_02_ramanujan_consistency() {
    gate(suites::ramanujan_consistency, 10);
}

#[test]
fn criterion_03_omega_table() {
    gate(suites::omega_table, 5);
}

#[test]
fn criterion_04_unit_bracket_table() {
    gate(suites::unit_bracket_table, 5);
}

#[test]
fn criterion_05_vz_equivalence() {
    gate(suites::vz_equivalence, 30);
}

#[test]
fn criterion_06_kk_from_vz() {
    gate(suites::kk_from_vz, 20);
}

#[test]
fn criterion_07_decompositions() {
    gate(suites::operator_decompositions, 20);
}

#[test]
fn criterion_08_kz_spectrum() {
    gate(suites::kz_spectrum_check, 30);
}

#[test]
fn criterion_09_theta() {
    gate(suites::theta_mlde, 30);
}

#[test]
fn criterion_10_rogers_ramanujan() {
    gate(suites::rogers_ramanujan_check, 30);
}

#[test]
fn criterion_11_round_trips() {
    gate(suites::isomorphism_round_trips, 30);
}

#[test]
fn criterion_12_projection() {
    gate(suites::projection_check, 30);
}

#[test]
fn criterion_13_completion() {
    gate(suites::completion_check, 20);
}

#[test]
fn criterion_14_depth() {
    gate(suites::depth_check, 60);
}

#[test]
fn criterion_15_e2_at_i() {
    // floating point sanity check
    gate(suites::e2_at_i, 1);
}
