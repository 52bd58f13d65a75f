//! Shipped experiment presets.
//!
//! Each preset is a plain [`RunConfig`] (or a grid of them) plus the trailing
//! analysis window its report uses. Every preset completes in seconds.

use crate::closed_loop::TrajectoryLog;
use crate::config::{
    ControllerModeSpec, ControllerSpec, IntegratorSpec, ObservableModeSpec, ObservableSpec,
    OperatorSpec, ProbeStyleSpec, RunConfig, StateSpec,
};

/// The south-pole pure state `|1>`.
fn south_pole() -> StateSpec {
    StateSpec::Amplitudes(vec![[0.0, 0.0], [1.0, 0.0]])
}

fn qubit_controls() -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::Pauli([0.5, 0.0, 0.0]),
        OperatorSpec::Pauli([0.0, 0.5, 0.0]),
    ]
}

fn double_probe_controller(alpha: f64, lambda: f64) -> ControllerSpec {
    ControllerSpec {
        mode: ControllerModeSpec::DoubleProbe,
        gains: vec![1.0, 1.0],
        alpha: vec![alpha, alpha],
        u_max: 2.0,
        lambda: Some(lambda),
        probe_amplitude: Some(0.5),
        lambda_coupling: true,
        probe_style: ProbeStyleSpec::Branch,
    }
}

fn exact_observable() -> ObservableSpec {
    ObservableSpec {
        mode: ObservableModeSpec::Exact,
        shots: None,
        eta_max: None,
    }
}

fn bounded_noise_observable(eta_max: f64) -> ObservableSpec {
    ObservableSpec {
        mode: ObservableModeSpec::BoundedNoise,
        shots: None,
        eta_max: Some(eta_max),
    }
}

/// Drift-free qubit, double-probe controller, start at the south pole.
pub fn qubit_driftfree_config() -> RunConfig {
    RunConfig {
        tau: 0.5,
        n_steps: 400,
        initial_state: south_pole(),
        drift: OperatorSpec::Pauli([0.0, 0.0, 0.0]),
        collapse_ops: Vec::new(),
        control_hams: qubit_controls(),
        controller: double_probe_controller(0.5, 2.0),
        observable: exact_observable(),
        integrator: IntegratorSpec::ExactUnitary,
        seed: 11,
    }
}

/// Qubit with the unknown drift `0.35 sx + 0.20 sy + 0.45 sz`, double-probe
/// controller, 2000 sampling instants.
pub fn qubit_drift_config() -> RunConfig {
    RunConfig {
        tau: 0.5,
        n_steps: 2000,
        initial_state: south_pole(),
        drift: OperatorSpec::Pauli([0.35, 0.20, 0.45]),
        collapse_ops: Vec::new(),
        control_hams: qubit_controls(),
        controller: double_probe_controller(0.02, 0.3),
        observable: exact_observable(),
        integrator: IntegratorSpec::ExactUnitary,
        seed: 8,
    }
}

/// Drift-free qubit under the sign-based law with boundedly corrupted
/// measurements. The noise breaks the bootstrap tie at the first instant and
/// sets the residual band; the tight saturation bound keeps one-step motion
/// inside the local-descent regime the sign rule relies on. Starts at a
/// mid-latitude point of the through-poles orbit circle, where the law's
/// descent lock engages after at most one corrected step.
pub fn qubit_signlaw_config() -> RunConfig {
    RunConfig {
        tau: 0.5,
        n_steps: 400,
        initial_state: StateSpec::Bloch([-0.6123724356957945, 0.6123724356957945, -0.5]),
        drift: OperatorSpec::Pauli([0.0, 0.0, 0.0]),
        collapse_ops: Vec::new(),
        control_hams: qubit_controls(),
        controller: ControllerSpec {
            mode: ControllerModeSpec::SignBased,
            gains: vec![0.3, 0.3],
            alpha: vec![0.1, 0.1],
            u_max: 0.3,
            lambda: None,
            probe_amplitude: None,
            lambda_coupling: true,
            probe_style: ProbeStyleSpec::Branch,
        },
        observable: bounded_noise_observable(0.02),
        integrator: IntegratorSpec::ExactUnitary,
        seed: 7,
    }
}

/// Measurement-noise grid for the robustness study.
pub const NOISE_SWEEP_ETAS: [f64; 4] = [0.0, 0.01, 0.05, 0.1];

/// Base run of the noise sweep; the grid swaps in each noise bound.
pub fn noise_sweep_base_config() -> RunConfig {
    RunConfig {
        n_steps: 600,
        observable: bounded_noise_observable(0.0),
        seed: 13,
        ..qubit_driftfree_config()
    }
}

pub fn noise_sweep_config(eta_max: f64) -> RunConfig {
    RunConfig {
        observable: bounded_noise_observable(eta_max),
        ..noise_sweep_base_config()
    }
}

/// Drift-magnitude grid for the disturbance-residual curve.
pub const DRIFT_SWEEP_SCALES: [f64; 3] = [0.25, 0.5, 1.0];

pub fn drift_sweep_config(scale: f64) -> RunConfig {
    let base = qubit_drift_config();
    RunConfig {
        drift: base.drift.scaled(scale),
        ..base
    }
}

/// What a preset executes: one run or a parameter grid.
#[derive(Debug, Clone)]
pub enum PresetKind {
    Single(Box<RunConfig>),
    /// Runs `noise_sweep_config(eta)` per grid point.
    NoiseSweep { etas: Vec<f64> },
    /// Runs `drift_sweep_config(scale)` per grid point.
    DriftSweep { scales: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub kind: PresetKind,
    /// Trailing window for residual and steady-state statistics.
    pub window: usize,
}

impl Preset {
    /// Runs a single-config preset and returns its log.
    pub fn run_single(&self) -> Result<TrajectoryLog, String> {
        match &self.kind {
            PresetKind::Single(cfg) => {
                let loop_cfg = cfg.resolve().map_err(|e| e.to_string())?;
                crate::closed_loop::run_closed_loop(&loop_cfg).map_err(|e| e.to_string())
            }
            _ => Err(format!(
                "preset '{}' is a sweep, not a single run",
                self.name
            )),
        }
    }

    /// The configs this preset executes, with a label per run.
    pub fn grid(&self) -> Vec<(String, RunConfig)> {
        match &self.kind {
            PresetKind::Single(cfg) => vec![(self.name.to_string(), (**cfg).clone())],
            PresetKind::NoiseSweep { etas } => etas
                .iter()
                .map(|&eta| (format!("eta-{eta}"), noise_sweep_config(eta)))
                .collect(),
            PresetKind::DriftSweep { scales } => scales
                .iter()
                .map(|&s| (format!("scale-{s}"), drift_sweep_config(s)))
                .collect(),
        }
    }
}

pub fn all() -> Vec<Preset> {
    vec![
        Preset {
            name: "qubit-driftfree",
            summary: "drift-free qubit, double-probe law, south-pole start, 400 steps",
            kind: PresetKind::Single(Box::new(qubit_driftfree_config())),
            window: 100,
        },
        Preset {
            name: "qubit-drift",
            summary: "qubit with unknown drift 0.35sx+0.20sy+0.45sz, double-probe law, 2000 steps",
            kind: PresetKind::Single(Box::new(qubit_drift_config())),
            window: 500,
        },
        Preset {
            name: "qubit-signlaw",
            summary: "drift-free qubit, sign-based law under bounded measurement noise",
            kind: PresetKind::Single(Box::new(qubit_signlaw_config())),
            window: 100,
        },
        Preset {
            name: "noise-sweep",
            summary: "drift-free robustness grid over measurement-noise bounds {0, 0.01, 0.05, 0.1}",
            kind: PresetKind::NoiseSweep {
                etas: NOISE_SWEEP_ETAS.to_vec(),
            },
            window: 200,
        },
        Preset {
            name: "drift-sweep",
            summary: "disturbance-residual curve over drift scales {0.25, 0.5, 1.0}",
            kind: PresetKind::DriftSweep {
                scales: DRIFT_SWEEP_SCALES.to_vec(),
            },
            window: 500,
        },
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|p| p.name).collect()
}
