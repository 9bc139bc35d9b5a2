//! One test per acceptance criterion, run at the fast level with the default seed.

use lorentz_metrics_cli::validate::{CRITERIA, DEFAULT_SEED, Level};

fn run(id: usize) {
    let report = CRITERIA[id - 1](Level::Fast, DEFAULT_SEED);
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_diamond_oracle_agreement() {
    run(1);
}

#[test]
fn criterion_02_cone_and_halfspace_equality_cases() {
    run(2);
}

#[test]
fn criterion_03_quasi_hyperbolic_sandwich() {
    run(3);
}

#[test]
fn criterion_04_null_distance_sandwich() {
    run(4);
}

#[test]
fn criterion_05_cosmological_time_closed_form() {
    run(5);
}

#[test]
fn criterion_06_stable_acausality_estimator() {
    run(6);
}

#[test]
fn criterion_07_hyperbolicity_discrimination() {
    run(7);
}

#[test]
fn criterion_08_quasigeodesic_certificate() {
    run(8);
}

#[test]
fn criterion_09_hilbert_versus_markowitz() {
    run(9);
}

#[test]
fn criterion_10_conformal_invariance() {
    run(10);
}
