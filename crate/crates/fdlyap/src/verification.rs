//! The acceptance suite: every gating criterion, runnable in-process.
//!
//! `verify` on the command line and the `acceptance` integration test both
//! call [`run_all`] and report one line per criterion. Tolerances and
//! thresholds are pinned here, not in the callers.

use std::time::Instant;

use serde::Serialize;

use crate::analysis::{
    check_descent, check_noise_robustness, check_plateau_exclusion, iss_residual, steady_state,
    window_envelopes,
};
use crate::closed_loop::{run_batch, run_closed_loop, LoopConfig, TrajectoryLog};
use crate::controller::ControllerState;
use crate::dynamics::{step_exact_unitary, step_rk4, ControlInput, GeneratorSpec};
use crate::presets;
use crate::quantum::HermitianOperator;
use crate::report::{envelope_bounded, trajectory_csv, QUBIT_DRIFT_REFERENCE_BLOCH};
use crate::sampling;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

const BATCH_SIZE: usize = 100;
const BATCH_SEED: u64 = 0xFD1A;

fn driftfree_batch_configs() -> Vec<LoopConfig> {
    let base = presets::qubit_driftfree_config()
        .resolve()
        .expect("preset resolves");
    let mut rng = sampling::rng(BATCH_SEED);
    (0..BATCH_SIZE)
        .map(|i| {
            let mut cfg = base.clone();
            cfg.initial_state = sampling::random_pure_qubit(&mut rng);
            cfg.seed = BATCH_SEED + i as u64;
            cfg
        })
        .collect()
}

fn collect_batch(cfgs: &[LoopConfig]) -> Result<Vec<TrajectoryLog>, String> {
    run_batch(cfgs)
        .into_iter()
        .enumerate()
        .map(|(i, res)| res.map_err(|e| format!("run {i}: {e}")))
        .collect()
}

fn fail(id: usize, name: &'static str, details: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name,
        passed: false,
        details,
    }
}

/// 1. Drift-free convergence over 100 random pure initial states.
fn criterion_1(logs: &[TrajectoryLog], elapsed_s: f64) -> CriterionOutcome {
    let finals: Vec<f64> = logs.iter().map(|l| l.final_v_exact()).collect();
    let below_tight = finals.iter().filter(|v| **v < 1e-3).count();
    let all_below_loose = finals.iter().all(|v| *v < 1e-2);
    let worst = finals.iter().fold(0.0f64, |a, &b| a.max(b));
    let passed = below_tight >= 99 && all_below_loose && elapsed_s < 30.0;
    CriterionOutcome {
        id: 1,
        name: "drift-free convergence",
        passed,
        details: format!(
            "{below_tight}/100 runs below 1e-3, worst final V {worst:.2e}, batch {elapsed_s:.2}s (< 30s)"
        ),
    }
}

/// 2. Finite-difference descent plus plateau exclusion on every batch run.
fn criterion_2(logs: &[TrajectoryLog]) -> CriterionOutcome {
    let mut descending = 0usize;
    let mut excluded = 0usize;
    for log in logs {
        if check_descent(log, 1e-12).first_descent_index.is_some() {
            descending += 1;
        }
        if [0.1, 0.3, 0.5]
            .iter()
            .all(|&floor| check_plateau_exclusion(log, floor, 50))
        {
            excluded += 1;
        }
    }
    let passed = descending == logs.len() && excluded == logs.len();
    CriterionOutcome {
        id: 2,
        name: "finite-difference descent chain",
        passed,
        details: format!(
            "{descending}/{} runs found a finite descent index, {excluded}/{} excluded every plateau floor",
            logs.len(),
            logs.len()
        ),
    }
}

/// 3. Exact arithmetic of the gain-growth ledger on a synthetic plateau.
fn criterion_3() -> CriterionOutcome {
    let alpha = [0.5, 0.7];
    let initial = [1.0, 1.0];
    let mut ctrl =
        ControllerState::sign_based(initial.to_vec(), alpha.to_vec(), 5.0).expect("valid");
    let steps = 100usize;
    for n in 0..=steps {
        let v = 0.5 + 0.1 * if n % 2 == 0 { 1.0 } else { -1.0 };
        ctrl.sign_based_update(v);
    }
    let mut worst = 0.0f64;
    for k in 0..2 {
        let expected = initial[k] + alpha[k] * 0.2 * (steps as f64 / 2.0).ceil();
        worst = worst.max((ctrl.gains()[k] - expected).abs());
    }
    CriterionOutcome {
        id: 3,
        name: "gain-growth ledger",
        passed: worst < 1e-12,
        details: format!("max deviation from alpha*0.2*50 ledger: {worst:.2e} (< 1e-12)"),
    }
}

/// 4. Disturbance-limited residual with a settling oscillation envelope.
fn criterion_4(drift_log: &TrajectoryLog, gen: &GeneratorSpec) -> CriterionOutcome {
    let report = match iss_residual(drift_log, gen, 0.5, 500) {
        Ok(r) => r,
        Err(e) => return fail(4, "disturbance residual", e.to_string()),
    };
    let envelopes = window_envelopes(drift_log, 100);
    let bounded = envelope_bounded(&envelopes, 0.02);
    let tail: Vec<String> = envelopes
        .iter()
        .rev()
        .take(3)
        .rev()
        .map(|e| format!("{e:.3}"))
        .collect();
    let passed = report.residual > 0.005 && report.residual < 0.5 && bounded;
    CriterionOutcome {
        id: 4,
        name: "disturbance residual",
        passed,
        details: format!(
            "trailing-500 mean V {:.4} in (0.005, 0.5), final envelopes [{}] nonincreasing: {bounded}",
            report.residual,
            tail.join(", ")
        ),
    }
}

/// 5. Residual monotonicity across the drift-magnitude sweep.
fn criterion_5(sweep: &[(f64, TrajectoryLog)], elapsed_s: f64) -> CriterionOutcome {
    let mut limsups = Vec::new();
    for (scale, log) in sweep {
        let gen = presets::drift_sweep_config(*scale)
            .resolve()
            .expect("sweep config resolves")
            .generator;
        match iss_residual(log, &gen, 0.5, 500) {
            Ok(r) => limsups.push(r.limsup_estimate),
            Err(e) => return fail(5, "disturbance-scaling monotonicity", e.to_string()),
        }
    }
    let monotone = limsups.windows(2).all(|w| w[1] >= w[0] - 0.02);
    let passed = monotone && elapsed_s < 60.0;
    CriterionOutcome {
        id: 5,
        name: "disturbance-scaling monotonicity",
        passed,
        details: format!(
            "limsup estimates {:?} nondecreasing (slack 0.02): {monotone}, sweep {elapsed_s:.2}s (< 60s)",
            limsups.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    }
}

/// 6. Steady Bloch vector of the drifted run: positive components, near-unit
///    norm, z inside the expected band. The componentwise comparison against
///    the recorded reference values is informational only.
fn criterion_6(drift_log: &TrajectoryLog) -> CriterionOutcome {
    let st = match steady_state(drift_log, 500) {
        Ok(s) => s,
        Err(e) => return fail(6, "steady-state reproduction", e.to_string()),
    };
    let (x, y, z) = st.bloch_mean;
    let norm = st.mean_norm();
    // A pure steady state has Bloch norm one up to rounding; permit the same
    // 1e-8 slack the state type allows on its positivity check.
    let passed = x > 0.0 && y > 0.0 && z > 0.0 && (0.8..=1.0 + 1e-8).contains(&norm)
        && (0.55..=0.95).contains(&z);
    let max_dev = [x, y, z]
        .iter()
        .zip(&QUBIT_DRIFT_REFERENCE_BLOCH)
        .map(|(m, r)| (m - r).abs())
        .fold(0.0f64, f64::max);
    CriterionOutcome {
        id: 6,
        name: "steady-state reproduction",
        passed,
        details: format!(
            "mean Bloch ({x:.4}, {y:.4}, {z:.4}), norm {norm:.4} in [0.8, 1.0], z in [0.55, 0.95]; \
             informational: max deviation from reference {max_dev:.4} ({} 0.15)",
            if max_dev <= 0.15 { "within" } else { "outside" }
        ),
    }
}

/// 7. Measurement-noise robustness across the bounded-noise grid.
fn criterion_7(noise_runs: &[(f64, TrajectoryLog)]) -> CriterionOutcome {
    let borrowed: Vec<(f64, &TrajectoryLog)> =
        noise_runs.iter().map(|(eta, log)| (*eta, log)).collect();
    let report = match check_noise_robustness(&borrowed, 200) {
        Ok(r) => r,
        Err(e) => return fail(7, "measurement-noise robustness", e.to_string()),
    };
    let at_tenth = *report.residuals.last().unwrap();
    let passed = report.slope_ok && at_tenth <= 20.0 * 0.1;
    CriterionOutcome {
        id: 7,
        name: "measurement-noise robustness",
        passed,
        details: format!(
            "residuals {:?} nondecreasing with residual(0) < 1e-3: {}, residual(0.1) = {at_tenth:.3} <= 2.0, empirical C {:.2}",
            report
                .residuals
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>(),
            report.slope_ok,
            report.c_empirical
        ),
    }
}

/// 8. Physics invariants and the information structure over every run above.
fn criterion_8(all_logs: &[&TrajectoryLog]) -> CriterionOutcome {
    let mut worst_trace = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    let mut controller_reads = 0u64;
    for log in all_logs {
        worst_trace = worst_trace.max(log.extremes.max_trace_error);
        worst_eig = worst_eig.min(log.extremes.min_eigenvalue);
        controller_reads += log.audit.controller_direct_reads;
    }
    let passed = worst_trace < 1e-9 && worst_eig >= -1e-8 && controller_reads == 0;
    CriterionOutcome {
        id: 8,
        name: "physics invariants and information structure",
        passed,
        details: format!(
            "{} runs: worst |tr-1| {worst_trace:.2e} (< 1e-9), worst min eigenvalue {worst_eig:.2e} (>= -1e-8), controller state reads {controller_reads}",
            all_logs.len()
        ),
    }
}

/// 9. Byte-identical trajectory CSV on a seeded rerun.
fn criterion_9(first: &TrajectoryLog) -> CriterionOutcome {
    let cfg = presets::qubit_drift_config();
    let rerun = match cfg.resolve().map_err(|e| e.to_string()).and_then(|c| {
        run_closed_loop(&c).map_err(|e| e.to_string())
    }) {
        Ok(log) => log,
        Err(e) => return fail(9, "determinism", e),
    };
    let a = trajectory_csv(first);
    let b = trajectory_csv(&rerun);
    let passed = a == b;
    CriterionOutcome {
        id: 9,
        name: "determinism",
        passed,
        details: format!(
            "rerun with seed {} produced {} bytes, byte-identical: {passed}",
            cfg.seed,
            b.len()
        ),
    }
}

/// 10. RK4 against the exact exponential on random unitary intervals, plus
///     the fourth-order convergence ratio.
fn criterion_10() -> CriterionOutcome {
    let controls = vec![
        HermitianOperator::pauli_x().scale(0.5),
        HermitianOperator::pauli_y().scale(0.5),
    ];
    let mut rng = sampling::rng(0xC10);
    use rand::Rng;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let drift = HermitianOperator::from_pauli_coefficients(
            rng.random_range(-0.45..0.45),
            rng.random_range(-0.45..0.45),
            rng.random_range(-0.45..0.45),
        );
        let gen = GeneratorSpec::unitary(drift, controls.clone()).expect("qubit generator");
        let rho = sampling::random_pure_qubit(&mut rng);
        let u = ControlInput::new(vec![
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ]);
        let exact = step_exact_unitary(&gen, &u, &rho, 0.5).expect("exact step");
        let rk = step_rk4(&gen, &u, &rho, 0.5, 64).expect("rk4 step");
        let err = exact.matrix().sub(rk.matrix()).frobenius_norm();
        worst = worst.max(err);
    }

    let gen = GeneratorSpec::unitary(
        HermitianOperator::from_pauli_coefficients(0.35, 0.20, 0.45),
        controls,
    )
    .expect("qubit generator");
    let rho = crate::quantum::DensityMatrix::pure_state(&[
        num_complex::Complex64::ZERO,
        num_complex::Complex64::ONE,
    ])
    .expect("south pole");
    let u = ControlInput::new(vec![1.0, 0.5]);
    let exact = step_exact_unitary(&gen, &u, &rho, 0.5).expect("exact step");
    let err_at = |s: u32| {
        let rk = step_rk4(&gen, &u, &rho, 0.5, s).expect("rk4 step");
        exact.matrix().sub(rk.matrix()).frobenius_norm()
    };
    let ratio = err_at(8) / err_at(16);
    let passed = worst < 1e-8 && (12.0..=20.0).contains(&ratio);
    CriterionOutcome {
        id: 10,
        name: "integrator cross-validation",
        passed,
        details: format!(
            "worst Frobenius error over 100 intervals {worst:.2e} (< 1e-8), order ratio {ratio:.1} in [12, 20]"
        ),
    }
}

/// Runs the full acceptance suite and returns one outcome per criterion,
/// ordered by id.
pub fn run_all() -> Vec<CriterionOutcome> {
    let mut outcomes = Vec::with_capacity(10);

    // Criteria 1-2 share the drift-free batch.
    let batch_cfgs = driftfree_batch_configs();
    let started = Instant::now();
    let batch = collect_batch(&batch_cfgs);
    let batch_elapsed = started.elapsed().as_secs_f64();
    match &batch {
        Ok(logs) => {
            outcomes.push(criterion_1(logs, batch_elapsed));
            outcomes.push(criterion_2(logs));
        }
        Err(e) => {
            outcomes.push(fail(1, "drift-free convergence", e.clone()));
            outcomes.push(fail(2, "finite-difference descent chain", e.clone()));
        }
    }

    outcomes.push(criterion_3());

    // Criteria 4, 6, 9 share the drifted-qubit run.
    let drift_cfg = presets::qubit_drift_config();
    let drift_run = drift_cfg
        .resolve()
        .map_err(|e| e.to_string())
        .and_then(|c| run_closed_loop(&c).map(|log| (log, c.generator)).map_err(|e| e.to_string()));
    match &drift_run {
        Ok((log, gen)) => {
            outcomes.push(criterion_4(log, gen));
        }
        Err(e) => outcomes.push(fail(4, "disturbance residual", e.clone())),
    }

    // Criterion 5: drift sweep.
    let sweep_started = Instant::now();
    let sweep: Result<Vec<(f64, TrajectoryLog)>, String> = presets::DRIFT_SWEEP_SCALES
        .iter()
        .map(|&s| {
            presets::drift_sweep_config(s)
                .resolve()
                .map_err(|e| e.to_string())
                .and_then(|c| run_closed_loop(&c).map_err(|e| e.to_string()))
                .map(|log| (s, log))
        })
        .collect();
    let sweep_elapsed = sweep_started.elapsed().as_secs_f64();
    match &sweep {
        Ok(runs) => outcomes.push(criterion_5(runs, sweep_elapsed)),
        Err(e) => outcomes.push(fail(5, "disturbance-scaling monotonicity", e.clone())),
    }

    match &drift_run {
        Ok((log, _)) => outcomes.push(criterion_6(log)),
        Err(e) => outcomes.push(fail(6, "steady-state reproduction", e.clone())),
    }

    // Criterion 7: bounded-noise sweep.
    let noise: Result<Vec<(f64, TrajectoryLog)>, String> = presets::NOISE_SWEEP_ETAS
        .iter()
        .map(|&eta| {
            presets::noise_sweep_config(eta)
                .resolve()
                .map_err(|e| e.to_string())
                .and_then(|c| run_closed_loop(&c).map_err(|e| e.to_string()))
                .map(|log| (eta, log))
        })
        .collect();
    match &noise {
        Ok(runs) => outcomes.push(criterion_7(runs)),
        Err(e) => outcomes.push(fail(7, "measurement-noise robustness", e.clone())),
    }

    // Criterion 8 audits every log produced above.
    let mut all_logs: Vec<&TrajectoryLog> = Vec::new();
    if let Ok(logs) = &batch {
        all_logs.extend(logs.iter());
    }
    if let Ok((log, _)) = &drift_run {
        all_logs.push(log);
    }
    if let Ok(runs) = &sweep {
        all_logs.extend(runs.iter().map(|(_, l)| l));
    }
    if let Ok(runs) = &noise {
        all_logs.extend(runs.iter().map(|(_, l)| l));
    }
    outcomes.push(criterion_8(&all_logs));

    match &drift_run {
        Ok((log, _)) => outcomes.push(criterion_9(log)),
        Err(e) => outcomes.push(fail(9, "determinism", e.clone())),
    }

    outcomes.push(criterion_10());
    outcomes.sort_by_key(|o| o.id);
    outcomes
}
