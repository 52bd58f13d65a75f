//! Finite-shot estimation of the Lyapunov observable.
//!
//! Each readout counts target outcomes over M identically prepared copies,
//! so estimates are binomial around the true value. The sample statistics
//! over many readouts match the predicted mean and spread, and a closed loop
//! driven by shot estimates still stabilizes the drift-free qubit.
//!
//! Run with: cargo run --example finite_shot_readout

use fdlyap::config::{ObservableModeSpec, ObservableSpec};
use fdlyap::measurement::{LyapunovObservable, NoiseMode};
use fdlyap::presets;
use fdlyap::quantum::{DensityMatrix, HermitianOperator};

fn main() {
    // statistics of the estimator at true V = 0.3
    let rho = DensityMatrix::from_bloch(0.0, 0.0, 0.4).unwrap();
    let target = HermitianOperator::basis_projector(2, 0).unwrap();
    println!("true V = 0.3, readout statistics over 100000 evaluations:");
    println!("shots      mean      stdev     predicted stdev");
    for shots in [25u64, 100, 400, 1600] {
        let mut obs =
            LyapunovObservable::new(target.clone(), NoiseMode::Shots { count: shots }, 99)
                .unwrap();
        let reps = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..reps {
            let v = obs.evaluate(&rho).unwrap();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / reps as f64;
        let stdev = (sum_sq / reps as f64 - mean * mean).sqrt();
        let predicted = (0.3f64 * 0.7 / shots as f64).sqrt();
        println!("{shots:>5}  {mean:>8.4}  {stdev:>8.4}  {predicted:>13.4}");
    }

    // a closed loop on shot estimates alone
    let mut cfg = presets::qubit_driftfree_config();
    cfg.observable = ObservableSpec {
        mode: ObservableModeSpec::Shots,
        shots: Some(2000),
        eta_max: None,
    };
    cfg.seed = 4242;
    let log = fdlyap::run_closed_loop(&cfg.resolve().expect("resolves")).expect("runs");
    let tail: Vec<f64> = log.rows[log.len() - 100..]
        .iter()
        .map(|r| r.v_exact)
        .collect();
    println!(
        "\nclosed loop with 2000-shot readouts: trailing-100 mean V = {:.4}",
        tail.iter().sum::<f64>() / tail.len() as f64
    );
}
