//! Acceptance gate: runs every criterion of the verification suite and
//! asserts each one individually, printing one pass/fail line per criterion.
//!
//! The expensive shared runs execute once; the per-criterion tests read the
//! memoized outcomes so failures stay attributable.

use std::sync::OnceLock;

use fdlyap::verification::{run_all, CriterionOutcome};

fn outcomes() -> &'static [CriterionOutcome] {
    static OUTCOMES: OnceLock<Vec<CriterionOutcome>> = OnceLock::new();
    OUTCOMES.get_or_init(run_all)
}

fn assert_criterion(id: usize) {
    let outcome = outcomes()
        .iter()
        .find(|o| o.id == id)
        .unwrap_or_else(|| panic!("criterion {id} missing from the suite"));
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_drift_free_convergence() {
    assert_criterion(1);
}

#[test]
fn criterion_02_finite_difference_descent_chain() {
    assert_criterion(2);
}

#[test]
fn criterion_03_gain_growth_ledger() {
    assert_criterion(3);
}

#[test]
fn criterion_04_disturbance_residual() {
    assert_criterion(4);
}

#[test]
fn criterion_05_disturbance_scaling_monotonicity() {
    assert_criterion(5);
}

#[test]
fn criterion_06_steady_state_reproduction() {
    assert_criterion(6);
}

#[test]
fn criterion_07_measurement_noise_robustness() {
    assert_criterion(7);
}

#[test]
fn criterion_08_physics_invariants_and_information_structure() {
    assert_criterion(8);
}

#[test]
fn criterion_09_determinism() {
    assert_criterion(9);
}

#[test]
fn criterion_10_integrator_cross_validation() {
    assert_criterion(10);
}

/// Degrading the integrator to one substep per interval must break the
/// cross-validation tolerance; the suite is sensitive to what it measures.
#[test]
fn degraded_integrator_fails_the_accuracy_gate() {
    use fdlyap::dynamics::{step_exact_unitary, step_rk4, ControlInput, GeneratorSpec};
    use fdlyap::quantum::{DensityMatrix, HermitianOperator};
    use num_complex::Complex64;

    let gen = GeneratorSpec::unitary(
        HermitianOperator::from_pauli_coefficients(0.35, 0.20, 0.45),
        vec![
            HermitianOperator::pauli_x().scale(0.5),
            HermitianOperator::pauli_y().scale(0.5),
        ],
    )
    .unwrap();
    let rho = DensityMatrix::pure_state(&[Complex64::ZERO, Complex64::ONE]).unwrap();
    let u = ControlInput::new(vec![1.0, 0.5]);
    let exact = step_exact_unitary(&gen, &u, &rho, 0.5).unwrap();
    let coarse = step_rk4(&gen, &u, &rho, 0.5, 1).unwrap();
    let err = exact.matrix().sub(coarse.matrix()).frobenius_norm();
    assert!(
        err > 1e-8,
        "one-substep integration must visibly miss the exact propagator, got {err:.2e}"
    );
}
