//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line and the per-check details.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use spectral2m::acceptance::run_criterion;

fn run(index: usize) {
    let report = run_criterion(index);
    println!("{}", report.summary_line());
    for d in &report.details {
        println!("    {d}");
    }
    assert!(report.passed, "criterion {index} failed");
}

#[test]
fn criterion_01_exact_spectrum() {
    run(1);
}

#[test]
fn criterion_02_kernel_ground_truth() {
    run(2);
}

#[test]
fn criterion_03_wkbj_phase() {
    run(3);
}

#[test]
fn criterion_04_decay_classification() {
    run(4);
}

#[test]
fn criterion_05_semigroup_expansion() {
    run(5);
}

#[test]
fn criterion_06_blowup() {
    run(6);
}

#[test]
fn criterion_07_centre_ode() {
    run(7);
}

#[test]
fn criterion_08_petrovskii() {
    run(8);
}

#[test]
fn criterion_09_nonlinear_pairs() {
    run(9);
}

#[test]
fn criterion_10_sequence_space() {
    run(10);
}
