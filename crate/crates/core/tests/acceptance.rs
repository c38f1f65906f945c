//! The acceptance gate: one test per criterion, each printing its outcome
//! line before asserting it, so a red run names the failing criterion and
//! its measured values directly in the test output.
//!
//! The reference ε-sweep feeds criteria 3–6 and is computed once per test
//! process; every other criterion builds its own inputs.

use std::sync::OnceLock;

use wulffsweep_core::acceptance::{self, CriterionOutcome};
use wulffsweep_core::sweep::SweepReport;

fn reference_sweep() -> &'static (SweepReport, f64) {
    static SWEEP: OnceLock<(SweepReport, f64)> = OnceLock::new();
    SWEEP.get_or_init(|| acceptance::reference_sweep().expect("reference sweep must run"))
}

fn gate(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_profile_identities() {
    gate(acceptance::criterion_profile_identities());
}

#[test]
fn criterion_02_discrete_minimality() {
    gate(acceptance::criterion_discrete_minimality());
}

#[test]
fn criterion_03_excess_vanishing() {
    let (report, seconds) = reference_sweep();
    gate(acceptance::criterion_excess_vanishing(report, *seconds));
}

#[test]
fn criterion_04_multiplier_limits() {
    let (report, _) = reference_sweep();
    gate(acceptance::criterion_multiplier_limits(report));
}

#[test]
fn criterion_05_shift_limits() {
    let (report, _) = reference_sweep();
    gate(acceptance::criterion_shift_limits(report));
}

#[test]
fn criterion_06_lower_barrier() {
    let (report, _) = reference_sweep();
    gate(acceptance::criterion_lower_barrier(report));
}

#[test]
fn criterion_07_recovery_side() {
    gate(acceptance::criterion_recovery_side());
}

#[test]
fn criterion_08_geometry() {
    gate(acceptance::criterion_geometry());
}

#[test]
fn criterion_09_rearrangement() {
    gate(acceptance::criterion_rearrangement());
}

#[test]
fn criterion_10_cross_check() {
    gate(acceptance::criterion_cross_check());
}
