//! Seeded Monte Carlo batch over random initial states.
//!
//! One hundred drift-free runs from Haar-random pure starts execute in
//! parallel; every run is pinned to its own seed, so the whole batch is
//! reproducible bit for bit.
//!
//! Run with: cargo run --example batch_random_states

use fdlyap::closed_loop::run_batch;
use fdlyap::presets;
use fdlyap::sampling;

fn main() {
    let base = presets::qubit_driftfree_config()
        .resolve()
        .expect("preset resolves");
    let mut rng = sampling::rng(2718);
    let cfgs: Vec<_> = (0..100)
        .map(|i| {
            let mut cfg = base.clone();
            cfg.initial_state = sampling::random_pure_qubit(&mut rng);
            cfg.seed = 2718 + i;
            cfg
        })
        .collect();

    let started = std::time::Instant::now();
    let logs: Vec<_> = run_batch(&cfgs)
        .into_iter()
        .collect::<Result<_, _>>()
        .expect("every run completes");
    let elapsed = started.elapsed();

    let finals: Vec<f64> = logs.iter().map(|l| l.final_v_exact()).collect();
    let below = |threshold: f64| finals.iter().filter(|v| **v < threshold).count();
    println!("runs                 : {}", logs.len());
    println!("elapsed              : {:.2?}", elapsed);
    println!("final V < 1e-3       : {}", below(1e-3));
    println!("final V < 1e-2       : {}", below(1e-2));
    println!(
        "worst final V        : {:.3e}",
        finals.iter().fold(0.0f64, |a, &b| a.max(b))
    );

    let steps_to = |log: &fdlyap::TrajectoryLog| {
        log.rows
            .iter()
            .position(|r| r.v_exact < 1e-3)
            .unwrap_or(log.len())
    };
    let mut settle: Vec<usize> = logs.iter().map(steps_to).collect();
    settle.sort_unstable();
    println!(
        "steps to V < 1e-3    : median {}, p90 {}, max {}",
        settle[settle.len() / 2],
        settle[settle.len() * 9 / 10],
        settle[settle.len() - 1]
    );
}
