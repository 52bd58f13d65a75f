//! Cross-module behavior of full runs and their analysis: residuals against
//! placeholder disturbance bounds, noise-sweep statistics on real logs, and
//! the stationarity comparison at the drifted steady state.

use fdlyap::analysis::{
    check_descent, check_noise_robustness, check_plateau_exclusion, iss_residual, mean_control,
    stationarity_defect, steady_state,
};
use fdlyap::closed_loop::run_closed_loop;
use fdlyap::dynamics::{ControlInput, GeneratorSpec};
use fdlyap::presets;
use fdlyap::quantum::{DensityMatrix, HermitianOperator};

#[test]
fn converged_run_has_vanishing_residual_against_a_placeholder_bound() {
    // A drift-free converged run divided by any positive disturbance bound
    // gives an empirical constant near zero; the placeholder drift only
    // supplies the nonzero denominator.
    let log = presets::find("qubit-driftfree").unwrap().run_single().unwrap();
    let placeholder = GeneratorSpec::unitary(
        HermitianOperator::from_pauli_coefficients(0.0, 0.0, 1e-3),
        vec![
            HermitianOperator::pauli_x().scale(0.5),
            HermitianOperator::pauli_y().scale(0.5),
        ],
    )
    .unwrap();
    let report = iss_residual(&log, &placeholder, 0.5, 100).unwrap();
    assert!(report.residual < 1e-6, "residual {}", report.residual);
    assert!(report.c_empirical < 1e-3, "C {}", report.c_empirical);
}

#[test]
fn drifted_run_keeps_a_strictly_positive_residual() {
    let cfg = presets::qubit_drift_config();
    let log = run_closed_loop(&cfg.resolve().unwrap()).unwrap();
    let gen = cfg.resolve().unwrap().generator;
    let report = iss_residual(&log, &gen, cfg.tau, 500).unwrap();
    assert!(report.residual > 0.0);
    assert!(report.limsup_estimate >= report.residual);
}

#[test]
fn halved_drift_does_not_worsen_the_residual() {
    let run = |scale: f64| {
        let cfg = presets::drift_sweep_config(scale);
        let log = run_closed_loop(&cfg.resolve().unwrap()).unwrap();
        let gen = cfg.resolve().unwrap().generator;
        iss_residual(&log, &gen, cfg.tau, 500).unwrap().residual
    };
    let half = run(0.5);
    let full = run(1.0);
    assert!(half <= full + 0.02, "half {half} vs full {full}");
}

#[test]
fn noise_robustness_on_real_runs() {
    let mut runs = Vec::new();
    for eta in presets::NOISE_SWEEP_ETAS {
        let cfg = presets::noise_sweep_config(eta);
        runs.push((eta, run_closed_loop(&cfg.resolve().unwrap()).unwrap()));
    }
    let borrowed: Vec<_> = runs.iter().map(|(e, l)| (*e, l)).collect();
    let report = check_noise_robustness(&borrowed, 200).unwrap();
    assert!(report.slope_ok);
    assert!(report.residuals[0] < 1e-3);
    assert!(report.c_empirical <= 20.0);
}

#[test]
fn steady_state_of_the_drifted_run_stays_in_the_unit_ball() {
    let log = presets::find("qubit-drift").unwrap().run_single().unwrap();
    let st = steady_state(&log, 500).unwrap();
    assert!(st.mean_norm() <= 1.0 + 1e-8);
}

#[test]
fn stationarity_defect_is_smaller_at_the_steady_state_than_at_the_target() {
    let cfg = presets::qubit_drift_config();
    let log = run_closed_loop(&cfg.resolve().unwrap()).unwrap();
    let gen = cfg.resolve().unwrap().generator;

    let st = steady_state(&log, 500).unwrap();
    let (x, y, z) = st.bloch_mean;
    let norm = st.mean_norm();
    let shrink = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    let rho_bar = DensityMatrix::from_bloch(x * shrink, y * shrink, z * shrink).unwrap();
    let u_bar = mean_control(&log, 500).unwrap();
    let at_steady = stationarity_defect(&rho_bar, &gen, &u_bar).unwrap();

    let target = DensityMatrix::from_bloch(0.0, 0.0, 1.0).unwrap();
    let at_target = stationarity_defect(&target, &gen, &ControlInput::zeros(2)).unwrap();

    assert!(at_target > 0.1, "target must not be drift-stationary");
    assert!(
        at_steady < at_target,
        "steady state defect {at_steady} vs target defect {at_target}"
    );
}

#[test]
fn sign_law_preset_reaches_a_noise_limited_band() {
    let log = presets::find("qubit-signlaw").unwrap().run_single().unwrap();
    let tail: Vec<f64> = log.rows[log.len() - 100..]
        .iter()
        .map(|r| r.v_exact)
        .collect();
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert!(mean < 0.15, "band mean {mean}");
    // saturation binds during the run
    let max_u = log
        .rows
        .iter()
        .flat_map(|r| r.u.iter())
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    assert!(max_u <= 0.3 + 1e-12);
    // the adaptive gains actually grew
    let grew = log.rows.last().unwrap().gains[0] > log.rows[0].gains[0] + 0.1;
    assert!(grew);
    // plateau exclusion still holds on the oscillating band
    for floor in [0.1, 0.3, 0.5] {
        assert!(check_plateau_exclusion(&log, floor, 50));
    }
}

#[test]
fn drifted_trajectory_shows_transient_descent_with_a_positive_floor() {
    let log = presets::find("qubit-drift").unwrap().run_single().unwrap();
    // strict descent cannot persist to the end at rounding tolerance while
    // the loop fights the drift, yet the trajectory still settles: the final
    // value sits well below the start and above the disturbance floor
    let first = log.rows.first().unwrap().v_exact;
    let last = log.final_v_exact();
    assert!(first > 0.99);
    assert!(last > 0.005 && last < 0.5, "floor {last}");
    let report = check_descent(&log, 1e-12);
    assert!(report.first_descent_index.is_some() || !report.violations.is_empty());
}
