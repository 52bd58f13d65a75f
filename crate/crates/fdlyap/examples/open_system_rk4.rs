//! Open-system evolution: dissipative noise, the RK4 integrator, and the
//! closed loop running on it.
//!
//! First the integrator is checked against the closed-form amplitude-damping
//! decay, then the controller fights a drifted, damped qubit where branch
//! probes and committed steps both integrate the full dissipative
//! right-hand side.
//!
//! Run with: cargo run --example open_system_rk4

use fdlyap::analysis::iss_residual;
use fdlyap::closed_loop::{run_closed_loop, LoopConfig, ProbeStyle};
use fdlyap::controller::ControllerState;
use fdlyap::dynamics::{
    disturbance_bound, lowering_operator, step_rk4, ControlInput, GeneratorSpec, Integrator,
};
use fdlyap::measurement::{LyapunovObservable, NoiseMode};
use fdlyap::quantum::{trace_inner, DensityMatrix, HermitianOperator};
use num_complex::Complex64;

fn main() {
    // 1. free decay of the excited population against exp(-gamma t)
    let gamma = 0.6;
    let gen = GeneratorSpec::new(
        HermitianOperator::zero(2),
        vec![lowering_operator(gamma)],
        vec![HermitianOperator::pauli_x().scale(0.5)],
    )
    .expect("dims agree");
    let p1 = HermitianOperator::basis_projector(2, 1).expect("projector");
    let mut rho = DensityMatrix::pure_state(&[Complex64::ZERO, Complex64::ONE]).unwrap();
    println!("free amplitude damping, gamma = {gamma}:");
    println!("   t    excited population    exp(-gamma t)");
    let dt = 0.5;
    for step in 0..=6 {
        let t = step as f64 * dt;
        let excited = trace_inner(&p1, &rho).unwrap();
        println!("{t:>4.1}  {excited:>19.6}  {:>14.6}", (-gamma * t).exp());
        rho = step_rk4(&gen, &ControlInput::zeros(1), &rho, dt, 64).unwrap();
    }

    // 2. closed loop against drift plus damping
    let damped = GeneratorSpec::new(
        HermitianOperator::from_pauli_coefficients(0.35, 0.20, 0.45),
        vec![lowering_operator(0.15)],
        vec![
            HermitianOperator::pauli_x().scale(0.5),
            HermitianOperator::pauli_y().scale(0.5),
        ],
    )
    .expect("dims agree");
    println!(
        "\ndrift + damping closed loop (D = {:.4}):",
        disturbance_bound(&damped)
    );
    let cfg = LoopConfig {
        tau: 0.5,
        n_steps: 1000,
        initial_state: DensityMatrix::pure_state(&[Complex64::ZERO, Complex64::ONE]).unwrap(),
        generator: damped.clone(),
        observable: LyapunovObservable::new(
            HermitianOperator::basis_projector(2, 0).unwrap(),
            NoiseMode::Exact,
            0,
        )
        .unwrap(),
        controller: ControllerState::double_probe(vec![1.0, 1.0], vec![0.02, 0.02], 2.0, 0.3, 0.5)
            .unwrap(),
        integrator: Integrator::default_rk4(),
        probe_style: ProbeStyle::Branch,
        seed: 33,
    };
    let log = run_closed_loop(&cfg).expect("dissipative run");
    let report = iss_residual(&log, &damped, cfg.tau, 300).expect("window fits");
    println!("trailing-300 residual: {:.4}", report.residual);
    println!(
        "worst trace error {:.1e}, worst eigenvalue {:.1e} across the run",
        log.extremes.max_trace_error, log.extremes.min_eigenvalue
    );
    println!("(this bath pulls toward the target yet the residual is no better");
    println!(" than the purely drifted preset's 0.12: the decay also decoheres");
    println!(" the state the loop is steering, and D grew from 1.21 to 1.66)");
}
