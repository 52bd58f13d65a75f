//! Model-free feedback laws driven by sampled Lyapunov values.
//!
//! Two controllers are implemented. The sign-based law actuates every channel
//! with `-kappa_k * sign(dV)` where `dV` is the latest sampled finite
//! difference; gains amplify by `alpha_k * |dV|` whenever the observed
//! decrease is insufficient (`dV >= 0`). The double-probe law evaluates the
//! one-step-ahead Lyapunov value under opposite constant probing inputs on
//! each channel, forms a pseudo-gradient from the symmetric difference, and
//! actuates against it with saturation.
//!
//! Neither controller ever sees the plant state; all information arrives as
//! scalar Lyapunov readouts, either sampled by the loop or returned by a
//! [`ProbeOracle`].

use thiserror::Error;

use crate::dynamics::{ControlInput, DynamicsError};
use crate::measurement::MeasurementError;

/// Exact probe ties with the sampled value above this level indicate a
/// symmetric critical point away from the target (for a qubit, the state
/// antipodal to the target). The pseudo-gradient vanishes there, so the
/// controller commits the first minimizing probe candidate instead of
/// holding the plant still forever.
const DEGENERATE_PROBE_V_FLOOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ControllerError {
    #[error("invalid controller parameter: {0}")]
    InvalidParameter(String),
    #[error("candidate list is empty")]
    EmptyCandidates,
    #[error("controller is not in double-probe mode")]
    NotDoubleProbe,
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// Failure of a one-step-ahead Lyapunov evaluation.
#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
}

/// Evaluates the Lyapunov observable after holding a constant candidate input
/// for `horizon` time units, starting from the current plant state.
///
/// Implementations must not mutate the plant's committed state unless they
/// deliberately model probing that consumes real time (the sequential style
/// in the closed loop).
pub trait ProbeOracle {
    fn lyapunov_after(&mut self, u: &ControlInput, horizon: f64) -> Result<f64, ProbeError>;
}

/// Which feedback law the controller runs, with the law-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerMode {
    SignBased,
    DoubleProbe {
        /// Pseudo-gradient step scale.
        lambda: f64,
        /// Probing amplitude; must not exceed the saturation bound.
        probe_amplitude: f64,
        /// Couple the step scale to gain amplification,
        /// `lambda_eff = lambda * kappa_k / kappa_k(t0)`.
        lambda_coupling: bool,
    },
}

/// Adaptive controller state: per-channel gains, amplification rates, the
/// saturation bound, and the previous sampled Lyapunov value.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    mode: ControllerMode,
    gains: Vec<f64>,
    initial_gains: Vec<f64>,
    alpha: Vec<f64>,
    u_max: f64,
    prev_v: Option<f64>,
}

impl ControllerState {
    pub fn new(
        mode: ControllerMode,
        gains: Vec<f64>,
        alpha: Vec<f64>,
        u_max: f64,
    ) -> Result<Self, ControllerError> {
        if gains.is_empty() {
            return Err(ControllerError::InvalidParameter(
                "at least one control channel is required".into(),
            ));
        }
        if gains.len() != alpha.len() {
            return Err(ControllerError::InvalidParameter(format!(
                "gains ({}) and alpha ({}) must have equal length",
                gains.len(),
                alpha.len()
            )));
        }
        if gains.iter().any(|&g| g <= 0.0) {
            return Err(ControllerError::InvalidParameter(
                "every gain must be positive".into(),
            ));
        }
        if alpha.iter().any(|&a| a <= 0.0) {
            return Err(ControllerError::InvalidParameter(
                "every amplification rate must be positive".into(),
            ));
        }
        if u_max <= 0.0 {
            return Err(ControllerError::InvalidParameter(
                "saturation bound must be positive".into(),
            ));
        }
        if let ControllerMode::DoubleProbe {
            lambda,
            probe_amplitude,
            ..
        } = mode
        {
            if lambda <= 0.0 {
                return Err(ControllerError::InvalidParameter(
                    "lambda must be positive".into(),
                ));
            }
            if probe_amplitude <= 0.0 {
                return Err(ControllerError::InvalidParameter(
                    "probe amplitude must be positive".into(),
                ));
            }
            if probe_amplitude > u_max {
                return Err(ControllerError::InvalidParameter(format!(
                    "probe amplitude {probe_amplitude} exceeds saturation bound {u_max}"
                )));
            }
        }
        Ok(Self {
            mode,
            initial_gains: gains.clone(),
            gains,
            alpha,
            u_max,
            prev_v: None,
        })
    }

    pub fn sign_based(
        gains: Vec<f64>,
        alpha: Vec<f64>,
        u_max: f64,
    ) -> Result<Self, ControllerError> {
        Self::new(ControllerMode::SignBased, gains, alpha, u_max)
    }

    pub fn double_probe(
        gains: Vec<f64>,
        alpha: Vec<f64>,
        u_max: f64,
        lambda: f64,
        probe_amplitude: f64,
    ) -> Result<Self, ControllerError> {
        Self::new(
            ControllerMode::DoubleProbe {
                lambda,
                probe_amplitude,
                lambda_coupling: true,
            },
            gains,
            alpha,
            u_max,
        )
    }

    pub fn mode(&self) -> ControllerMode {
        self.mode
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn initial_gains(&self) -> &[f64] {
        &self.initial_gains
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn prev_v(&self) -> Option<f64> {
        self.prev_v
    }

    pub fn channels(&self) -> usize {
        self.gains.len()
    }

    fn clamp(&self, u: f64) -> f64 {
        u.clamp(-self.u_max, self.u_max)
    }

    /// Folds the sampled value into the adaptive state: gains amplify by
    /// `alpha_k * |dV|` when the observed decrease is insufficient
    /// (`dV >= 0`; an exactly constant window contributes nothing).
    fn absorb_sample(&mut self, v_now: f64) {
        if let Some(prev) = self.prev_v {
            let dv = v_now - prev;
            if dv >= 0.0 {
                for (gain, rate) in self.gains.iter_mut().zip(&self.alpha) {
                    *gain += rate * dv.abs();
                }
            }
        }
        self.prev_v = Some(v_now);
    }

    /// Sign-based update `u_k = clamp(-kappa_k * sign(V(t_n) - V(t_{n-1})))`.
    ///
    /// The first call has no finite difference yet and returns zero input so
    /// the loop can collect the second sample. `sign(0) = 0`: no actuation
    /// when the observable was locally constant.
    pub fn sign_based_update(&mut self, v_now: f64) -> ControlInput {
        let u = match self.prev_v {
            None => ControlInput::zeros(self.channels()),
            Some(prev) => {
                let dv = v_now - prev;
                let direction = -sign(dv);
                ControlInput::new(
                    self.gains
                        .iter()
                        .map(|&g| self.clamp(g * direction))
                        .collect(),
                )
            }
        };
        self.absorb_sample(v_now);
        u
    }

    /// Double-probe update: per channel `k`, evaluate the one-step-ahead
    /// Lyapunov value under `+-probe_amplitude` held for `probe_horizon`,
    /// form the pseudo-gradient
    /// `g_k = (V+_k - V-_k) / (2 * probe_amplitude * probe_horizon)`,
    /// and actuate `u_k = clamp(-lambda_eff_k * g_k)`.
    ///
    /// `v_now` is the Lyapunov sample at the current instant; it drives the
    /// same gain amplification bookkeeping as the sign-based law, which in
    /// turn raises actuation authority through `lambda_eff` when coupling is
    /// enabled.
    pub fn double_probe_update(
        &mut self,
        v_now: f64,
        oracle: &mut dyn ProbeOracle,
        probe_horizon: f64,
    ) -> Result<ControlInput, ControllerError> {
        let ControllerMode::DoubleProbe {
            lambda,
            probe_amplitude,
            lambda_coupling,
        } = self.mode
        else {
            return Err(ControllerError::NotDoubleProbe);
        };
        let m = self.channels();
        let mut plus = Vec::with_capacity(m);
        let mut minus = Vec::with_capacity(m);
        for k in 0..m {
            plus.push(oracle.lyapunov_after(
                &ControlInput::single(m, k, probe_amplitude),
                probe_horizon,
            )?);
            minus.push(oracle.lyapunov_after(
                &ControlInput::single(m, k, -probe_amplitude),
                probe_horizon,
            )?);
        }

        let mut values = Vec::with_capacity(m);
        let mut all_tied = true;
        for k in 0..m {
            let diff = plus[k] - minus[k];
            if diff != 0.0 {
                all_tied = false;
            }
            let g = diff / (2.0 * probe_amplitude * probe_horizon);
            let lambda_eff = if lambda_coupling {
                lambda * self.gains[k] / self.initial_gains[k]
            } else {
                lambda
            };
            values.push(self.clamp(-lambda_eff * g));
        }

        let u = if all_tied && v_now > DEGENERATE_PROBE_V_FLOOR {
            // Every symmetric difference vanished while the observable is
            // still large: commit the first probe candidate with the smallest
            // one-step-ahead value (first index wins ties).
            let mut best = (0usize, probe_amplitude, plus[0]);
            for k in 0..m {
                if plus[k] < best.2 {
                    best = (k, probe_amplitude, plus[k]);
                }
                if minus[k] < best.2 {
                    best = (k, -probe_amplitude, minus[k]);
                }
            }
            ControlInput::single(m, best.0, best.1)
        } else {
            ControlInput::new(values)
        };

        self.absorb_sample(v_now);
        Ok(u)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Returns the candidate with the smallest one-step-ahead Lyapunov value;
/// ties break toward the earliest index.
pub fn select_argmin_candidate(
    oracle: &mut dyn ProbeOracle,
    candidates: &[ControlInput],
    horizon: f64,
) -> Result<ControlInput, ControllerError> {
    let mut best: Option<(usize, f64)> = None;
    for (index, candidate) in candidates.iter().enumerate() {
        let value = oracle.lyapunov_after(candidate, horizon)?;
        match best {
            Some((_, best_value)) if value >= best_value => {}
            _ => best = Some((index, value)),
        }
    }
    match best {
        Some((index, _)) => Ok(candidates[index].clone()),
        None => Err(ControllerError::EmptyCandidates),
    }
}
