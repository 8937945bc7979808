//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible under `cargo test -- --nocapture`).
//!
//! The enumeration budget defaults to 20 bits (CI profile); set
//! PERSYMM_MAX_BITS=24 for the deeper local sweep.

use persymm::checks::{self, CriterionReport};

fn budget() -> u32 {
    std::env::var("PERSYMM_MAX_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(20)
}

fn assert_criterion(report: CriterionReport) {
    println!("{}", report.summary_line());
    for case in report.failures() {
        println!("  FAIL {}: {}", case.name, case.detail);
    }
    assert!(
        report.pass(),
        "criterion {} ({}) failed",
        report.id,
        report.title
    );
}

#[test]
fn criterion_01_golden_tables() {
    assert_criterion(checks::criterion_golden_tables());
}

#[test]
fn criterion_02_solution_counts() {
    assert_criterion(checks::criterion_solution_counts());
}

#[test]
fn criterion_03_oracle_equivalence() {
    assert_criterion(checks::criterion_oracle_equivalence(budget()));
}

#[test]
fn criterion_04_moment_identities() {
    assert_criterion(checks::criterion_moments(budget()));
}

#[test]
fn criterion_05_low_rank_universality() {
    assert_criterion(checks::criterion_low_rank_universality());
}

#[test]
fn criterion_06_recurrence_crosscheck() {
    assert_criterion(checks::criterion_recurrence_crosscheck());
}

#[test]
fn criterion_07_a_coefficients() {
    assert_criterion(checks::criterion_a_coefficients());
}

#[test]
fn criterion_08_exponential_sums() {
    assert_criterion(checks::criterion_exponential_sums(budget().max(24)));
}

#[test]
fn criterion_09_profile_vanishing() {
    assert_criterion(checks::criterion_profile_vanishing());
}

#[test]
fn criterion_10_solution_enumeration() {
    assert_criterion(checks::criterion_solution_enumeration());
}

#[test]
fn criterion_11_invertible_fraction() {
    assert_criterion(checks::criterion_invertible_fraction());
}

#[test]
fn criterion_12_reduction_formulas() {
    assert_criterion(checks::criterion_reductions(budget()));
}
