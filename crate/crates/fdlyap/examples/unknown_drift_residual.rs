//! Practical stabilization against an unknown drift Hamiltonian.
//!
//! The plant precesses under `0.35 sx + 0.20 sy + 0.45 sz`, which the
//! controller can neither see nor cancel. The Lyapunov observable settles at
//! a strictly positive, disturbance-limited residual, and the steady Bloch
//! vector parks near the drift-stationary direction rather than the target
//! pole.
//!
//! Run with: cargo run --example unknown_drift_residual

use fdlyap::analysis::{iss_residual, mean_control, stationarity_defect, steady_state};
use fdlyap::dynamics::{disturbance_bound, ControlInput};
use fdlyap::presets;
use fdlyap::quantum::DensityMatrix;

fn main() {
    let cfg = presets::qubit_drift_config();
    let resolved = cfg.resolve().expect("preset resolves");
    let gen = resolved.generator.clone();
    let log = fdlyap::run_closed_loop(&resolved).expect("drifted run");

    println!("disturbance bound D = {:.6}", disturbance_bound(&gen));
    println!("\n   n       V(t_n)");
    for &n in &[0usize, 10, 50, 100, 500, 1000, 2000] {
        println!("{:>5}  {:>10.4}", n, log.rows[n].v_exact);
    }

    let iss = iss_residual(&log, &gen, cfg.tau, 500).expect("window fits");
    println!("\ntrailing-500 residual       : {:.4}", iss.residual);
    println!("trailing-500 limsup estimate: {:.4}", iss.limsup_estimate);
    println!("empirical C = limsup/(D*tau): {:.4}", iss.c_empirical);

    let st = steady_state(&log, 500).expect("qubit log");
    let (x, y, z) = st.bloch_mean;
    println!("\nsteady Bloch mean  : ({x:.4}, {y:.4}, {z:.4})");
    println!("steady Bloch norm  : {:.4}", st.mean_norm());
    let drift_axis = [0.35, 0.20, 0.45].map(|c| c / 0.365f64.sqrt());
    println!(
        "drift axis         : ({:.4}, {:.4}, {:.4})",
        drift_axis[0], drift_axis[1], drift_axis[2]
    );

    // The empirical steady state nearly commutes with the closed-loop
    // generator; the target does not.
    let norm = st.mean_norm().max(1.0);
    let rho_bar = DensityMatrix::from_bloch(x / norm, y / norm, z / norm).unwrap();
    let u_bar = mean_control(&log, 500).unwrap();
    let target = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
    println!(
        "\nstationarity defect at steady state: {:.4e}",
        stationarity_defect(&rho_bar, &gen, &u_bar).unwrap()
    );
    println!(
        "stationarity defect at the target  : {:.4e}",
        stationarity_defect(&target, &gen, &ControlInput::zeros(2)).unwrap()
    );
}
