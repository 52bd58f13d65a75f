//! POVM statistics and the measurement-derived Lyapunov observable.
//!
//! The observable `V(rho) = 1 - Tr(P rho)` can be read out three ways: exact
//! values (the idealization used by the drift-free theory), finite-shot
//! frequencies over `M` identically prepared copies, or exact values plus
//! bounded corruption drawn uniformly from `[-eta_max, +eta_max]`. Shot and
//! noise draws come from a seeded deterministic stream owned by the
//! observable, so a run is reproducible bit for bit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::linalg::QuantumError;
use crate::quantum::{trace_inner, DensityMatrix, HermitianOperator};

#[derive(Debug, Clone, Error)]
pub enum MeasurementError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("POVM must contain at least one effect")]
    EmptyPovm,
    #[error("POVM effect {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    EffectNotPositive { index: usize, min_eigenvalue: f64 },
    #[error("POVM effects do not sum to the identity (max deviation {max_deviation:.3e})")]
    NotAResolution { max_deviation: f64 },
    #[error("target is not a rank-one projector (idempotency defect {defect:.3e}, trace {trace})")]
    NotAProjector { defect: f64, trace: f64 },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("noise bound must be nonnegative, got {eta_max}")]
    NegativeNoiseBound { eta_max: f64 },
}

/// Positive operator-valued measure `{M_j}` with `sum_j M_j = I`.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self, MeasurementError> {
        let Some(first) = effects.first() else {
            return Err(MeasurementError::EmptyPovm);
        };
        let dim = first.dim();
        let mut sum = crate::linalg::ComplexMatrix::zeros(dim);
        for (index, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    left: dim,
                    right: effect.dim(),
                }
                .into());
            }
            let min_eigenvalue = crate::quantum::hermitian_eigensystem(effect)
                .eigenvalues
                .first()
                .copied()
                .unwrap_or(0.0);
            if min_eigenvalue < -1e-10 {
                return Err(MeasurementError::EffectNotPositive {
                    index,
                    min_eigenvalue,
                });
            }
            sum = sum.add(effect.matrix());
        }
        let deviation = sum.max_abs_diff(&crate::linalg::ComplexMatrix::identity(dim));
        if deviation > 1e-10 {
            return Err(MeasurementError::NotAResolution {
                max_deviation: deviation,
            });
        }
        Ok(Self { effects })
    }

    /// Two-outcome projective measurement `{P, I - P}`.
    pub fn projective(target: &HermitianOperator) -> Result<Self, MeasurementError> {
        let complement = HermitianOperator::new(
            crate::linalg::ComplexMatrix::identity(target.dim()).sub(target.matrix()),
        )
        .map_err(MeasurementError::from)?;
        Self::new(vec![target.clone(), complement])
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Outcome probabilities `Tr(M_j rho)`, clipped to `[0, 1]`.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>, MeasurementError> {
        if self.dim() != rho.dim() {
            return Err(QuantumError::DimensionMismatch {
                left: self.dim(),
                right: rho.dim(),
            }
            .into());
        }
        let mut probabilities = Vec::with_capacity(self.effects.len());
        let mut total = 0.0;
        for effect in &self.effects {
            let p = trace_inner(effect, rho)?;
            assert!(
                (-1e-10..=1.0 + 1e-10).contains(&p),
                "outcome probability {p} outside [0, 1] beyond tolerance"
            );
            let clipped = p.clamp(0.0, 1.0);
            total += clipped;
            probabilities.push(clipped);
        }
        assert!(
            (total - 1.0).abs() < 1e-9,
            "outcome probabilities sum to {total}, expected 1"
        );
        Ok(probabilities)
    }
}

/// How the Lyapunov observable is read out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// `1 - Tr(P rho)` exactly.
    Exact,
    /// Empirical frequency over `count` independent preparations.
    Shots { count: u64 },
    /// Exact value plus a uniform draw from `[-eta_max, +eta_max]`.
    BoundedNoise { eta_max: f64 },
}

/// The measurement-derived Lyapunov observable `V = 1 - Tr(P rho)` for a
/// rank-one target projector `P`, with a seeded readout stream.
#[derive(Debug, Clone)]
pub struct LyapunovObservable {
    target: HermitianOperator,
    mode: NoiseMode,
    rng_seed: u64,
    rng: ChaCha8Rng,
}

impl LyapunovObservable {
    pub fn new(
        target: HermitianOperator,
        mode: NoiseMode,
        rng_seed: u64,
    ) -> Result<Self, MeasurementError> {
        let squared = target.matrix().matmul(target.matrix());
        let defect = squared.max_abs_diff(target.matrix());
        let trace = target.matrix().trace().re;
        if defect > 1e-10 || (trace - 1.0).abs() > 1e-10 {
            return Err(MeasurementError::NotAProjector { defect, trace });
        }
        match mode {
            NoiseMode::Shots { count: 0 } => return Err(MeasurementError::ZeroShots),
            NoiseMode::BoundedNoise { eta_max } if eta_max < 0.0 => {
                return Err(MeasurementError::NegativeNoiseBound { eta_max })
            }
            _ => {}
        }
        Ok(Self {
            target,
            mode,
            rng_seed,
            rng: crate::sampling::rng(rng_seed),
        })
    }

    pub fn target(&self) -> &HermitianOperator {
        &self.target
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// Fresh copy with the readout stream rewound to `seed`.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self {
            target: self.target.clone(),
            mode: self.mode,
            rng_seed: seed,
            rng: crate::sampling::rng(seed),
        }
    }

    /// Noiseless `1 - Tr(P rho)`; does not touch the readout stream.
    pub fn exact_value(&self, rho: &DensityMatrix) -> Result<f64, MeasurementError> {
        Ok(1.0 - trace_inner(&self.target, rho)?)
    }

    /// One readout of the observable in the configured mode.
    pub fn evaluate(&mut self, rho: &DensityMatrix) -> Result<f64, MeasurementError> {
        let exact = self.exact_value(rho)?;
        Ok(match self.mode {
            NoiseMode::Exact => exact,
            NoiseMode::Shots { count } => {
                let p_target = (1.0 - exact).clamp(0.0, 1.0);
                let successes = Binomial::new(count, p_target)
                    .expect("clipped probability is valid")
                    .sample(&mut self.rng);
                1.0 - successes as f64 / count as f64
            }
            NoiseMode::BoundedNoise { eta_max } => {
                if eta_max > 0.0 {
                    exact + self.rng.random_range(-eta_max..=eta_max)
                } else {
                    exact
                }
            }
        })
    }

    /// Certifies properness at one state: `V` vanishes exactly when the state
    /// is the target projector. Test support for the exact readout mode.
    pub fn is_proper_at(&self, rho: &DensityMatrix) -> Result<bool, MeasurementError> {
        let v_zero = self.exact_value(rho)? < 1e-9;
        let diff = rho.matrix().sub(self.target.matrix());
        let state_at_target = diff.frobenius_norm() < 1e-4;
        Ok(v_zero == state_at_target)
    }
}
