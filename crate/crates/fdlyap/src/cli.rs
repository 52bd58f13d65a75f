//! Command-line verbs: `run-preset`, `run-config`, `verify`, `list-presets`.
//!
//! Each verb is a plain function so the thin binary, the examples, and the
//! tests all drive the same code. Outputs land in an output directory
//! (created if missing): `trajectory.csv`, `report.json`, and
//! `run-metadata.json` per run; sweep presets write each run into its own
//! subdirectory plus a combined report at the top level.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::check_noise_robustness;
use crate::closed_loop::{run_closed_loop, TrajectoryLog};
use crate::config::{ConfigError, ObservableModeSpec, RunConfig};
use crate::presets::{self, Preset, PresetKind};
use crate::report::{analyze_run, to_pretty_json, trajectory_csv, RunReport};
use crate::verification;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "FDLYAP_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("json error: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("physics invariant violation: {0}")]
    Physics(String),
    #[error("unknown preset '{name}'; available: {available}")]
    UnknownPreset { name: String, available: String },
    #[error("run failed: {0}")]
    Run(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable process exit code per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(_) => 1,
            CliError::Json(_) | CliError::Schema(_) | CliError::UnknownPreset { .. } => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Schema(msg) => CliError::Schema(msg),
            ConfigError::Physics(msg) => CliError::Physics(msg),
        }
    }
}

/// Overridable knobs shared by `run-preset` and `run-config`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub shots: Option<u64>,
    pub eta_max: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(steps) = self.steps {
            cfg.n_steps = steps;
        }
        if let Some(shots) = self.shots {
            cfg.observable.mode = ObservableModeSpec::Shots;
            cfg.observable.shots = Some(shots);
            cfg.observable.eta_max = None;
        }
        if let Some(eta_max) = self.eta_max {
            cfg.observable.mode = ObservableModeSpec::BoundedNoise;
            cfg.observable.eta_max = Some(eta_max);
            cfg.observable.shots = None;
        }
    }
}

/// Resolves the output directory: explicit flag, then `FDLYAP_OUT`, then
/// `./fdlyap-out`.
pub fn default_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fdlyap-out"))
}

fn execute(cfg: &RunConfig) -> Result<TrajectoryLog, CliError> {
    let loop_cfg = cfg.resolve()?;
    run_closed_loop(&loop_cfg).map_err(|e| CliError::Run(e.to_string()))
}

fn write_run_outputs(
    dir: &Path,
    cfg: &RunConfig,
    log: &TrajectoryLog,
    report: &RunReport,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trajectory.csv"), trajectory_csv(log))?;
    fs::write(dir.join("report.json"), to_pretty_json(report))?;
    fs::write(dir.join("run-metadata.json"), cfg.to_json())?;
    Ok(())
}

/// Default trailing window when a config comes from a file rather than a
/// preset: a quarter of the run, capped at 500 samples.
pub fn default_window(n_steps: usize) -> usize {
    (n_steps / 4).clamp(10, 500)
}

#[derive(Serialize)]
struct SweepRunEntry {
    label: String,
    directory: String,
    final_v_exact: f64,
}

#[derive(Serialize)]
struct SweepMetadata {
    preset: String,
    runs: Vec<SweepRunEntry>,
}

#[derive(Serialize)]
struct NoiseSweepReport {
    preset: String,
    noise_robustness: crate::analysis::NoiseRobustness,
    runs: Vec<SweepRunEntry>,
}

#[derive(Serialize)]
struct DriftSweepReport {
    preset: String,
    scales: Vec<f64>,
    limsup_estimates: Vec<f64>,
    residuals: Vec<f64>,
    nondecreasing_with_slack: bool,
    runs: Vec<SweepRunEntry>,
}

fn run_sweep(preset: &Preset, overrides: Overrides, out_dir: &Path) -> Result<(), CliError> {
    use rayon::prelude::*;
    let grid = preset.grid();
    let mut prepared: Vec<(String, RunConfig)> = Vec::with_capacity(grid.len());
    for (label, mut cfg) in grid {
        overrides.apply(&mut cfg);
        prepared.push((label, cfg));
    }
    // a steps override may shrink the runs below the preset's window
    let window = preset
        .window
        .min((prepared[0].1.n_steps / 2).max(1));
    let results: Vec<Result<TrajectoryLog, CliError>> = prepared
        .par_iter()
        .map(|(_, cfg)| execute(cfg))
        .collect();
    let mut logs = Vec::with_capacity(results.len());
    for ((label, _), result) in prepared.iter().zip(results) {
        logs.push(result.map_err(|e| CliError::Run(format!("{label}: {e}")))?);
    }

    let mut entries = Vec::new();
    for ((label, cfg), log) in prepared.iter().zip(&logs) {
        let sub = out_dir.join(format!("run-{label}"));
        let report = analyze_run(&format!("{}/{label}", preset.name), cfg, log, window);
        write_run_outputs(&sub, cfg, log, &report)?;
        entries.push(SweepRunEntry {
            label: label.clone(),
            directory: format!("run-{label}"),
            final_v_exact: log.final_v_exact(),
        });
    }

    fs::create_dir_all(out_dir)?;
    match &preset.kind {
        PresetKind::NoiseSweep { etas } => {
            let paired: Vec<(f64, &TrajectoryLog)> =
                etas.iter().copied().zip(logs.iter()).collect();
            let robustness = check_noise_robustness(&paired, window)
                .map_err(|e| CliError::Run(e.to_string()))?;
            let report = NoiseSweepReport {
                preset: preset.name.to_string(),
                noise_robustness: robustness,
                runs: entries,
            };
            fs::write(out_dir.join("report.json"), to_pretty_json(&report))?;
        }
        PresetKind::DriftSweep { scales } => {
            let mut limsups = Vec::new();
            let mut residuals = Vec::new();
            for ((_, cfg), log) in prepared.iter().zip(&logs) {
                let gen = cfg.resolve()?.generator;
                let iss = crate::analysis::iss_residual(log, &gen, cfg.tau, window)
                    .map_err(|e| CliError::Run(e.to_string()))?;
                limsups.push(iss.limsup_estimate);
                residuals.push(iss.residual);
            }
            let monotone = limsups.windows(2).all(|w| w[1] >= w[0] - 0.02);
            let report = DriftSweepReport {
                preset: preset.name.to_string(),
                scales: scales.clone(),
                limsup_estimates: limsups,
                residuals,
                nondecreasing_with_slack: monotone,
                runs: entries,
            };
            fs::write(out_dir.join("report.json"), to_pretty_json(&report))?;
        }
        PresetKind::Single(_) => unreachable!("single presets do not take the sweep path"),
    }
    let metadata = SweepMetadata {
        preset: preset.name.to_string(),
        runs: prepared
            .iter()
            .zip(&logs)
            .map(|((label, _), log)| SweepRunEntry {
                label: label.clone(),
                directory: format!("run-{label}"),
                final_v_exact: log.final_v_exact(),
            })
            .collect(),
    };
    fs::write(out_dir.join("run-metadata.json"), to_pretty_json(&metadata))?;
    Ok(())
}

/// Runs a shipped preset into `out_dir`.
pub fn run_preset(name: &str, overrides: Overrides, out_dir: &Path) -> Result<(), CliError> {
    let preset = presets::find(name).ok_or_else(|| CliError::UnknownPreset {
        name: name.to_string(),
        available: presets::names().join(", "),
    })?;
    match &preset.kind {
        PresetKind::Single(cfg) => {
            let mut cfg = (**cfg).clone();
            overrides.apply(&mut cfg);
            let log = execute(&cfg)?;
            let report = analyze_run(preset.name, &cfg, &log, preset.window);
            write_run_outputs(out_dir, &cfg, &log, &report)
        }
        _ => run_sweep(&preset, overrides, out_dir),
    }
}

/// Runs a strict JSON config file into `out_dir`.
pub fn run_config_file(
    path: &Path,
    overrides: Overrides,
    out_dir: &Path,
) -> Result<(), CliError> {
    let text = fs::read_to_string(path)?;
    let mut cfg = RunConfig::from_json(&text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => CliError::Schema(e.to_string()),
        _ => CliError::Json(e.to_string()),
    })?;
    overrides.apply(&mut cfg);
    let log = execute(&cfg)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "config-run".to_string());
    let report = analyze_run(&name, &cfg, &log, default_window(cfg.n_steps));
    write_run_outputs(out_dir, &cfg, &log, &report)
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    criteria: Vec<verification::CriterionOutcome>,
}

/// Runs the acceptance suite, printing one line per criterion and writing
/// `verify-report.json`. Returns whether every criterion passed.
pub fn verify(out_dir: &Path) -> Result<bool, CliError> {
    let outcomes = verification::run_all();
    for outcome in &outcomes {
        println!("{}", outcome.line());
    }
    let passed = outcomes.iter().all(|o| o.passed);
    fs::create_dir_all(out_dir)?;
    let report = VerifyReport {
        passed,
        criteria: outcomes,
    };
    fs::write(out_dir.join("verify-report.json"), to_pretty_json(&report))?;
    Ok(passed)
}

/// Name and summary of every shipped preset.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    presets::all().into_iter().map(|p| (p.name, p.summary)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_lists_the_alternatives() {
        let err = run_preset("no-such", Overrides::default(), Path::new("/tmp/unused"))
            .expect_err("must fail");
        let msg = err.to_string();
        assert!(msg.contains("qubit-driftfree"));
        assert!(msg.contains("qubit-drift"));
        assert!(msg.contains("noise-sweep"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn default_out_dir_resolution_order() {
        assert_eq!(
            default_out_dir(Some(PathBuf::from("/x"))),
            PathBuf::from("/x")
        );
        // With no flag the result is either the env value or the fallback;
        // both are nonempty paths.
        assert!(!default_out_dir(None).as_os_str().is_empty());
    }

    #[test]
    fn window_default_tracks_run_length() {
        assert_eq!(default_window(2000), 500);
        assert_eq!(default_window(400), 100);
        assert_eq!(default_window(12), 10);
    }
}
