//! JSON experiment configs and their resolution into runnable loop configs.
//!
//! Parsing is strict: unknown keys are rejected, and every parameter a run
//! needs is either present or has a fixed documented default, so the resolved
//! metadata written next to a run is itself a valid config that reproduces
//! the run bit for bit.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major lists of
//! rows. Hamiltonians accept either `{"pauli": [cx, cy, cz]}` (qubits) or
//! `{"matrix": [[..], ..]}` (any dimension). The Lyapunov target is the
//! projector onto the first basis state of the configured dimension; other
//! targets are available through the library API.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_loop::{LoopConfig, ProbeStyle};
use crate::controller::{ControllerMode, ControllerState};
use crate::dynamics::{GeneratorSpec, Integrator};
use crate::linalg::{ComplexMatrix, QuantumError};
use crate::measurement::{LyapunovObservable, NoiseMode};
use crate::quantum::{DensityMatrix, HermitianOperator};
use num_complex::Complex64;

/// Errors from config handling, split by class so the CLI can report
/// malformed documents, schema violations, and physics-invariant violations
/// distinctly.
#[derive(Debug, Clone, Error)]
pub enum ConfigError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("physics invariant violation: {0}")]
    Physics(String),
}

fn physics(err: QuantumError) -> ConfigError {
    ConfigError::Physics(err.to_string())
}

/// One complete experiment: plant, controller, observable, integrator, seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tau: f64,
    pub n_steps: usize,
    pub initial_state: StateSpec,
    pub drift: OperatorSpec,
    #[serde(default)]
    pub collapse_ops: Vec<MatrixSpec>,
    pub control_hams: Vec<OperatorSpec>,
    pub controller: ControllerSpec,
    pub observable: ObservableSpec,
    pub integrator: IntegratorSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Pure state amplitudes, one `[re, im]` pair per basis state.
    Amplitudes(Vec<[f64; 2]>),
    /// Qubit Bloch vector `[x, y, z]` with norm at most one.
    Bloch([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `cx*sx + cy*sy + cz*sz` (qubit only).
    Pauli([f64; 3]),
    /// Explicit Hermitian matrix, rows of `[re, im]` pairs.
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl OperatorSpec {
    pub fn is_zero(&self) -> bool {
        match self {
            OperatorSpec::Pauli(c) => c.iter().all(|&x| x == 0.0),
            OperatorSpec::Matrix(rows) => rows
                .iter()
                .all(|row| row.iter().all(|&[re, im]| re == 0.0 && im == 0.0)),
        }
    }

    /// Same operator scaled by `s`; used by the drift sweep.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            OperatorSpec::Pauli([x, y, z]) => OperatorSpec::Pauli([s * x, s * y, s * z]),
            OperatorSpec::Matrix(rows) => OperatorSpec::Matrix(
                rows.iter()
                    .map(|row| row.iter().map(|&[re, im]| [s * re, s * im]).collect())
                    .collect(),
            ),
        }
    }
}

/// General (not necessarily Hermitian) matrix, for collapse operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerModeSpec {
    SignBased,
    DoubleProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStyleSpec {
    #[default]
    Branch,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub mode: ControllerModeSpec,
    pub gains: Vec<f64>,
    pub alpha: Vec<f64>,
    pub u_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_amplitude: Option<f64>,
    /// Couple the pseudo-gradient step scale to gain amplification.
    #[serde(default = "default_true")]
    pub lambda_coupling: bool,
    #[serde(default)]
    pub probe_style: ProbeStyleSpec,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableModeSpec {
    Exact,
    Shots,
    BoundedNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub mode: ObservableModeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorSpec {
    ExactUnitary,
    Rk4 { substeps: u32 },
}

fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>], what: &str) -> Result<ComplexMatrix, ConfigError> {
    let dim = rows.len();
    if dim == 0 {
        return Err(ConfigError::Schema(format!("{what}: matrix is empty")));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(ConfigError::Schema(format!(
                "{what}: row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        entries.extend(row.iter().copied().map(complex));
    }
    ComplexMatrix::from_rows(dim, entries).map_err(|e| ConfigError::Schema(format!("{what}: {e}")))
}

fn hamiltonian(
    spec: &OperatorSpec,
    dim: usize,
    what: &str,
) -> Result<HermitianOperator, ConfigError> {
    match spec {
        OperatorSpec::Pauli(c) => {
            if dim != 2 {
                return Err(ConfigError::Schema(format!(
                    "{what}: pauli coefficients require dimension 2, system has {dim}"
                )));
            }
            Ok(HermitianOperator::from_pauli_coefficients(c[0], c[1], c[2]))
        }
        OperatorSpec::Matrix(rows) => {
            let m = matrix_from_rows(rows, what)?;
            if m.dim() != dim {
                return Err(ConfigError::Schema(format!(
                    "{what}: matrix dimension {} does not match system dimension {dim}",
                    m.dim()
                )));
            }
            HermitianOperator::new(m).map_err(|e| ConfigError::Physics(format!("{what}: {e}")))
        }
    }
}

impl RunConfig {
    /// Parses a strict JSON document.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Canonical pretty-printed form; written as `run-metadata.json`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn is_drift_free(&self) -> bool {
        self.drift.is_zero() && self.collapse_ops.is_empty()
    }

    /// Validates every field and builds the runnable loop config.
    pub fn resolve(&self) -> Result<LoopConfig, ConfigError> {
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(ConfigError::Schema(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.n_steps == 0 {
            return Err(ConfigError::Schema("n_steps must be at least 1".into()));
        }

        let initial_state = match &self.initial_state {
            StateSpec::Amplitudes(pairs) => {
                if pairs.is_empty() {
                    return Err(ConfigError::Schema(
                        "initial_state.amplitudes must be nonempty".into(),
                    ));
                }
                let amplitudes: Vec<Complex64> = pairs.iter().copied().map(complex).collect();
                DensityMatrix::pure_state(&amplitudes).map_err(physics)?
            }
            StateSpec::Bloch([x, y, z]) => {
                DensityMatrix::from_bloch(*x, *y, *z).map_err(physics)?
            }
        };
        let dim = initial_state.dim();

        let drift = hamiltonian(&self.drift, dim, "drift")?;
        let mut collapse = Vec::with_capacity(self.collapse_ops.len());
        for (i, MatrixSpec::Matrix(rows)) in self.collapse_ops.iter().enumerate() {
            let m = matrix_from_rows(rows, &format!("collapse_ops[{i}]"))?;
            if m.dim() != dim {
                return Err(ConfigError::Schema(format!(
                    "collapse_ops[{i}]: dimension {} does not match system dimension {dim}",
                    m.dim()
                )));
            }
            collapse.push(m);
        }
        if self.control_hams.is_empty() {
            return Err(ConfigError::Schema(
                "at least one control Hamiltonian is required".into(),
            ));
        }
        let mut controls = Vec::with_capacity(self.control_hams.len());
        for (i, spec) in self.control_hams.iter().enumerate() {
            controls.push(hamiltonian(spec, dim, &format!("control_hams[{i}]"))?);
        }
        let generator = GeneratorSpec::new(drift, collapse, controls)
            .map_err(|e| ConfigError::Physics(e.to_string()))?;

        let channels = generator.channels();
        let c = &self.controller;
        if c.gains.len() != channels || c.alpha.len() != channels {
            return Err(ConfigError::Schema(format!(
                "controller.gains and controller.alpha must have one entry per control Hamiltonian ({channels})"
            )));
        }
        let mode = match c.mode {
            ControllerModeSpec::SignBased => {
                if c.lambda.is_some() || c.probe_amplitude.is_some() {
                    return Err(ConfigError::Schema(
                        "lambda and probe_amplitude only apply to double_probe mode".into(),
                    ));
                }
                ControllerMode::SignBased
            }
            ControllerModeSpec::DoubleProbe => {
                let lambda = c.lambda.ok_or_else(|| {
                    ConfigError::Schema("double_probe mode requires controller.lambda".into())
                })?;
                let probe_amplitude = c.probe_amplitude.ok_or_else(|| {
                    ConfigError::Schema(
                        "double_probe mode requires controller.probe_amplitude".into(),
                    )
                })?;
                ControllerMode::DoubleProbe {
                    lambda,
                    probe_amplitude,
                    lambda_coupling: c.lambda_coupling,
                }
            }
        };
        let controller = ControllerState::new(mode, c.gains.clone(), c.alpha.clone(), c.u_max)
            .map_err(|e| ConfigError::Schema(e.to_string()))?;

        let o = &self.observable;
        let noise_mode = match o.mode {
            ObservableModeSpec::Exact => {
                if o.shots.is_some() || o.eta_max.is_some() {
                    return Err(ConfigError::Schema(
                        "exact observable mode takes neither shots nor eta_max".into(),
                    ));
                }
                NoiseMode::Exact
            }
            ObservableModeSpec::Shots => {
                if o.eta_max.is_some() {
                    return Err(ConfigError::Schema(
                        "shots observable mode does not take eta_max".into(),
                    ));
                }
                NoiseMode::Shots {
                    count: o.shots.ok_or_else(|| {
                        ConfigError::Schema("shots observable mode requires shots".into())
                    })?,
                }
            }
            ObservableModeSpec::BoundedNoise => {
                if o.shots.is_some() {
                    return Err(ConfigError::Schema(
                        "bounded_noise observable mode does not take shots".into(),
                    ));
                }
                NoiseMode::BoundedNoise {
                    eta_max: o.eta_max.ok_or_else(|| {
                        ConfigError::Schema(
                            "bounded_noise observable mode requires eta_max".into(),
                        )
                    })?,
                }
            }
        };
        let target = HermitianOperator::basis_projector(dim, 0).map_err(physics)?;
        let observable = LyapunovObservable::new(target, noise_mode, self.seed)
            .map_err(|e| ConfigError::Schema(e.to_string()))?;

        let integrator = match self.integrator {
            IntegratorSpec::ExactUnitary => {
                if !generator.is_unitary() {
                    return Err(ConfigError::Schema(
                        "exact_unitary integrator requires empty collapse_ops; use rk4".into(),
                    ));
                }
                Integrator::ExactUnitary
            }
            IntegratorSpec::Rk4 { substeps } => {
                if substeps == 0 {
                    return Err(ConfigError::Schema("rk4 substeps must be at least 1".into()));
                }
                Integrator::Rk4 { substeps }
            }
        };

        Ok(LoopConfig {
            tau: self.tau,
            n_steps: self.n_steps,
            initial_state,
            generator,
            observable,
            controller,
            integrator,
            probe_style: match c.probe_style {
                ProbeStyleSpec::Branch => ProbeStyle::Branch,
                ProbeStyleSpec::Sequential => ProbeStyle::Sequential,
            },
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "tau": 0.5,
            "n_steps": 10,
            "initial_state": {"amplitudes": [[0.0, 0.0], [1.0, 0.0]]},
            "drift": {"pauli": [0.35, 0.2, 0.45]},
            "control_hams": [{"pauli": [0.5, 0.0, 0.0]}, {"pauli": [0.0, 0.5, 0.0]}],
            "controller": {
                "mode": "double_probe",
                "gains": [1.0, 1.0],
                "alpha": [0.5, 0.5],
                "u_max": 2.0,
                "lambda": 2.0,
                "probe_amplitude": 0.5
            },
            "observable": {"mode": "exact"},
            "integrator": "exact_unitary",
            "seed": 7
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_parses_and_resolves() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        let resolved = cfg.resolve().unwrap();
        assert_eq!(resolved.n_steps, 10);
        assert_eq!(resolved.generator.channels(), 2);
        assert!(!cfg.is_drift_free());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = minimal_json().replace("\"tau\": 0.5,", "\"tau\": 0.5, \"extra_knob\": 1,");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn zero_tau_is_a_schema_error() {
        let text = minimal_json().replace("\"tau\": 0.5", "\"tau\": 0.0");
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn non_hermitian_drift_is_a_physics_error() {
        let text = minimal_json().replace(
            r#""drift": {"pauli": [0.35, 0.2, 0.45]}"#,
            r#""drift": {"matrix": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}"#,
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Physics(_))));
    }

    #[test]
    fn mode_parameter_pairing_is_enforced() {
        let missing_lambda = minimal_json().replace("\"lambda\": 2.0,", "");
        let cfg = RunConfig::from_json(&missing_lambda).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Schema(_))));

        let shots_without_count =
            minimal_json().replace(r#"{"mode": "exact"}"#, r#"{"mode": "shots"}"#);
        let cfg = RunConfig::from_json(&shots_without_count).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Schema(_))));

        let exact_with_eta =
            minimal_json().replace(r#"{"mode": "exact"}"#, r#"{"mode": "exact", "eta_max": 0.1}"#);
        let cfg = RunConfig::from_json(&exact_with_eta).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn exact_unitary_with_collapse_ops_is_rejected() {
        let text = minimal_json().replace(
            "\"control_hams\"",
            r#""collapse_ops": [{"matrix": [[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}], "control_hams""#,
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.resolve(), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        let text = cfg.to_json();
        let reparsed = RunConfig::from_json(&text).unwrap();
        assert_eq!(cfg, reparsed);
        assert_eq!(text, reparsed.to_json());
    }

    #[test]
    fn bloch_initial_state_resolves() {
        let text = minimal_json().replace(
            r#"{"amplitudes": [[0.0, 0.0], [1.0, 0.0]]}"#,
            r#"{"bloch": [0.0, 0.0, -1.0]}"#,
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        let resolved = cfg.resolve().unwrap();
        let (_, _, z) = resolved.initial_state.bloch_components().unwrap();
        assert!((z + 1.0).abs() < 1e-12);
    }
}
