//! Acceptance suite at the default configuration, one test per criterion.
//! PASS/FAIL lines go to the raw stderr handle, outside output capture.

use std::io::Write;
use std::sync::LazyLock;

use osmoflow::config::RunConfig;
use osmoflow::verify::{CriterionResult, Verifier};

static VERIFIER: LazyLock<Verifier> = LazyLock::new(|| Verifier::new(RunConfig::default()));

fn check(id: u8) -> CriterionResult {
    let result = VERIFIER.run(id);
    let _ = writeln!(std::io::stderr(), "acceptance: {}", result.line());
    assert!(result.passed, "{}\n{:#}", result.line(), result.metrics);
    result
}

#[test]
fn criterion_01_kernel_dimension() {
    let r = check(1);
    assert_eq!(r.metrics["kernel_dimension"], 4);
}

#[test]
fn criterion_02_negative_real_spectrum() {
    check(2);
}

#[test]
fn criterion_03_semisimplicity() {
    check(3);
}

#[test]
fn criterion_04_stokes_energy_identity() {
    check(4);
}

#[test]
fn criterion_05_stokes_response_signs() {
    check(5);
}

#[test]
fn criterion_06_lopatinskii_shapiro() {
    let r = check(6);
    assert_eq!(r.metrics["points"].as_array().map(Vec::len), Some(20));
}

#[test]
fn criterion_07_manufactured_convergence() {
    check(7);
}

#[test]
fn criterion_08_nonlinear_gradient_flow() {
    check(8);
}

#[test]
fn criterion_09_linear_nonlinear_consistency() {
    check(9);
}

#[test]
fn criterion_10_phi_matrix_positivity() {
    check(10);
}
