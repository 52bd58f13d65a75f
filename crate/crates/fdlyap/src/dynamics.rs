//! The plant: continuous-time evolution under drift, Lindblad noise, and
//! piecewise-constant control.
//!
//! Two propagators are provided. [`step_exact_unitary`] exponentiates the
//! total Hamiltonian through its eigendecomposition and is exact for closed
//! systems; [`step_rk4`] integrates the full Lindblad right-hand side with
//! classical fourth-order Runge-Kutta. A step operation takes one constant
//! [`ControlInput`] for its whole duration, so zero-order hold is a property
//! of the interface rather than a convention callers must remember.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{eigh, spectral_norm, ComplexMatrix, QuantumError};
use crate::quantum::{commutator_raw, DensityMatrix, HermitianOperator};

/// Substeps per sampling interval used by the presets; keeps the RK4-vs-exact
/// discrepancy far below the smallest Lyapunov changes the controller reacts to.
pub const DEFAULT_SUBSTEPS: u32 = 64;

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("control input has {got} channels, generator has {expected}")]
    ChannelCountMismatch { expected: usize, got: usize },
    #[error("exact unitary propagation requires an empty collapse-operator list")]
    CollapseOpsPresent,
    #[error("time step must be positive, got {dt}")]
    NonPositiveTimeStep { dt: f64 },
    #[error("substep count must be at least 1")]
    ZeroSubsteps,
    #[error("integration failure: trace drifted by {drift:.3e} in one call")]
    TraceDrift { drift: f64 },
}

/// Scalar control amplitudes, one per control Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlInput(Vec<f64>);

impl ControlInput {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(channels: usize) -> Self {
        Self(vec![0.0; channels])
    }

    /// All channels zero except channel `k` at `value`.
    pub fn single(channels: usize, k: usize, value: f64) -> Self {
        assert!(k < channels, "channel {k} out of range for {channels}");
        let mut v = vec![0.0; channels];
        v[k] = value;
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// The plant as seen by the simulator (never by the controller): drift
/// Hamiltonian, Lindblad collapse operators, and the control Hamiltonians.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    drift: HermitianOperator,
    collapse_ops: Vec<ComplexMatrix>,
    control_hams: Vec<HermitianOperator>,
    /// Cached `L† L` per collapse operator.
    collapse_grams: Vec<ComplexMatrix>,
}

impl GeneratorSpec {
    pub fn new(
        drift: HermitianOperator,
        collapse_ops: Vec<ComplexMatrix>,
        control_hams: Vec<HermitianOperator>,
    ) -> Result<Self, DynamicsError> {
        let dim = drift.dim();
        for l in &collapse_ops {
            if l.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    left: dim,
                    right: l.dim(),
                }
                .into());
            }
        }
        for h in &control_hams {
            if h.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    left: dim,
                    right: h.dim(),
                }
                .into());
            }
        }
        let collapse_grams = collapse_ops
            .iter()
            .map(|l| l.adjoint().matmul(l))
            .collect();
        Ok(Self {
            drift,
            collapse_ops,
            control_hams,
            collapse_grams,
        })
    }

    /// Closed system: drift plus controls, no dissipation.
    pub fn unitary(
        drift: HermitianOperator,
        control_hams: Vec<HermitianOperator>,
    ) -> Result<Self, DynamicsError> {
        Self::new(drift, Vec::new(), control_hams)
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn channels(&self) -> usize {
        self.control_hams.len()
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.drift
    }

    pub fn collapse_ops(&self) -> &[ComplexMatrix] {
        &self.collapse_ops
    }

    pub fn control_hams(&self) -> &[HermitianOperator] {
        &self.control_hams
    }

    pub fn is_unitary(&self) -> bool {
        self.collapse_ops.is_empty()
    }

    /// Same controls and noise, drift Hamiltonian scaled by `s`.
    pub fn with_drift_scaled(&self, s: f64) -> Self {
        Self {
            drift: self.drift.scale(s),
            collapse_ops: self.collapse_ops.clone(),
            control_hams: self.control_hams.clone(),
            collapse_grams: self.collapse_grams.clone(),
        }
    }

    fn check_input(&self, u: &ControlInput) -> Result<(), DynamicsError> {
        if u.len() != self.channels() {
            return Err(DynamicsError::ChannelCountMismatch {
                expected: self.channels(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// `H_drift + sum_k u_k H_k`.
    pub fn total_hamiltonian(&self, u: &ControlInput) -> Result<HermitianOperator, DynamicsError> {
        self.check_input(u)?;
        let mut total = self.drift.clone();
        for (h, &uk) in self.control_hams.iter().zip(u.values()) {
            total = total.add(&h.scale(uk));
        }
        Ok(total)
    }
}

/// Lindblad right-hand side on a raw matrix. Used by the integrator on
/// intermediate stage values that are not valid states.
pub(crate) fn rhs_raw(gen: &GeneratorSpec, hamiltonian: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = commutator_raw(hamiltonian, m).scale(minus_i);
    for (l, ltl) in gen.collapse_ops.iter().zip(&gen.collapse_grams) {
        let jump = l.matmul(m).matmul(&l.adjoint());
        let anti = ltl.matmul(m).add(&m.matmul(ltl)).scale_re(0.5);
        out = out.add(&jump.sub(&anti));
    }
    out
}

/// `-i[H_drift + sum u_k H_k, rho] + sum_k (L rho L† - (1/2){L†L, rho})`.
pub fn lindblad_rhs(
    gen: &GeneratorSpec,
    u: &ControlInput,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix, DynamicsError> {
    if gen.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            left: gen.dim(),
            right: rho.dim(),
        }
        .into());
    }
    let h = gen.total_hamiltonian(u)?;
    Ok(rhs_raw(gen, h.matrix(), rho.matrix()))
}

/// One zero-order-hold step `rho -> U rho U†` with
/// `U = exp(-i (H_drift + sum u_k H_k) dt)`, through the eigendecomposition
/// of the total Hamiltonian. Only valid for closed systems.
pub fn step_exact_unitary(
    gen: &GeneratorSpec,
    u: &ControlInput,
    rho: &DensityMatrix,
    dt: f64,
) -> Result<DensityMatrix, DynamicsError> {
    if !gen.is_unitary() {
        return Err(DynamicsError::CollapseOpsPresent);
    }
    if dt <= 0.0 {
        return Err(DynamicsError::NonPositiveTimeStep { dt });
    }
    if gen.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            left: gen.dim(),
            right: rho.dim(),
        }
        .into());
    }
    let h = gen.total_hamiltonian(u)?;
    let eig = eigh(h.matrix().inner());
    let n = gen.dim();
    let mut phases = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        phases[(k, k)] = Complex64::new(0.0, -lam * dt).exp();
    }
    let v = eig.eigenvectors.inner();
    let propagator = v * phases * v.adjoint();
    let evolved = &propagator * rho.matrix().inner() * propagator.adjoint();
    let next = ComplexMatrix::from_inner(evolved).symmetrized();
    Ok(DensityMatrix::new(next)?)
}

/// Classical fourth-order Runge-Kutta on the Lindblad right-hand side with
/// `substeps` equal substeps. The state is symmetrized once per substep and
/// never renormalized; a trace drift above 1e-6 in one call is an error.
pub fn step_rk4(
    gen: &GeneratorSpec,
    u: &ControlInput,
    rho: &DensityMatrix,
    dt: f64,
    substeps: u32,
) -> Result<DensityMatrix, DynamicsError> {
    if substeps == 0 {
        return Err(DynamicsError::ZeroSubsteps);
    }
    if dt <= 0.0 {
        return Err(DynamicsError::NonPositiveTimeStep { dt });
    }
    if gen.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            left: gen.dim(),
            right: rho.dim(),
        }
        .into());
    }
    let h = gen.total_hamiltonian(u)?;
    let hm = h.matrix();
    let step = dt / f64::from(substeps);
    let half = step / 2.0;
    let mut m = rho.matrix().clone();
    let trace_in = m.trace();
    for _ in 0..substeps {
        let k1 = rhs_raw(gen, hm, &m);
        let k2 = rhs_raw(gen, hm, &m.add(&k1.scale_re(half)));
        let k3 = rhs_raw(gen, hm, &m.add(&k2.scale_re(half)));
        let k4 = rhs_raw(gen, hm, &m.add(&k3.scale_re(step)));
        let increment = k1
            .add(&k2.scale_re(2.0))
            .add(&k3.scale_re(2.0))
            .add(&k4)
            .scale_re(step / 6.0);
        m = m.add(&increment).symmetrized();
    }
    let drift = (m.trace() - trace_in).norm();
    if drift > 1e-6 {
        return Err(DynamicsError::TraceDrift { drift });
    }
    Ok(DensityMatrix::new(m)?)
}

/// Integrator selection for a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    ExactUnitary,
    Rk4 { substeps: u32 },
}

impl Integrator {
    pub fn default_rk4() -> Self {
        Integrator::Rk4 {
            substeps: DEFAULT_SUBSTEPS,
        }
    }

    pub fn step(
        &self,
        gen: &GeneratorSpec,
        u: &ControlInput,
        rho: &DensityMatrix,
        dt: f64,
    ) -> Result<DensityMatrix, DynamicsError> {
        match self {
            Integrator::ExactUnitary => step_exact_unitary(gen, u, rho, dt),
            Integrator::Rk4 { substeps } => step_rk4(gen, u, rho, dt, *substeps),
        }
    }
}

/// Conservative bound `D` with `||F_drift(rho) + F_noise(rho)||_1 <= D` for
/// every state: `2 ||H_drift||_op + sum_k (2 ||L_k||_op^2 + ||L_k† L_k||_op)`.
pub fn disturbance_bound(gen: &GeneratorSpec) -> f64 {
    let mut d = 2.0 * gen.drift.operator_norm();
    for (l, ltl) in gen.collapse_ops.iter().zip(&gen.collapse_grams) {
        let l_norm = spectral_norm(l.inner());
        let ltl_norm = eigh(ltl.inner())
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        d += 2.0 * l_norm * l_norm + ltl_norm;
    }
    d
}

/// Lowering operator `|0><1|`, scaled by `sqrt(rate)`.
pub fn lowering_operator(rate: f64) -> ComplexMatrix {
    let s = rate.sqrt();
    ComplexMatrix::from_rows(
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(s, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
        ],
    )
    .expect("2x2 entries")
}
