//! Quantum-state domain types and their physical invariants.
//!
//! [`HermitianOperator`] and [`DensityMatrix`] are validating wrappers around
//! [`ComplexMatrix`]; once constructed they are immutable, so sharing them
//! across threads is safe. Tolerances follow 64-bit float arithmetic
//! throughout: hermiticity 1e-12, unit trace 1e-10, eigenvalue floor -1e-8.
//!
//! States are never projected back onto the physical set. A state that leaves
//! it beyond tolerance is a constructor error, which keeps integrator bugs
//! visible instead of silently repaired.

use num_complex::Complex64;

use crate::linalg::{eigh, ComplexMatrix, Eigensystem, QuantumError};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_RE_TOL: f64 = 1e-10;
pub const TRACE_IM_TOL: f64 = 1e-12;
/// Numerical positivity floor for density-matrix eigenvalues.
pub const EIGENVALUE_FLOOR: f64 = -1e-8;

/// A Hermitian matrix: Hamiltonians, projectors, POVM effects.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(QuantumError::NotHermitian { max_deviation: dev });
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Result<Self, QuantumError> {
        Self::new(ComplexMatrix::from_rows(dim, entries)?)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_rows(
            2,
            vec![
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ],
        )
        .expect("pauli x is Hermitian")
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(
            2,
            vec![
                Complex64::ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::ZERO,
            ],
        )
        .expect("pauli y is Hermitian")
    }

    pub fn pauli_z() -> Self {
        Self::from_rows(
            2,
            vec![
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(-1.0, 0.0),
            ],
        )
        .expect("pauli z is Hermitian")
    }

    /// `cx*sx + cy*sy + cz*sz` for a qubit.
    pub fn from_pauli_coefficients(cx: f64, cy: f64, cz: f64) -> Self {
        Self::from_rows(
            2,
            vec![
                Complex64::new(cz, 0.0),
                Complex64::new(cx, -cy),
                Complex64::new(cx, cy),
                Complex64::new(-cz, 0.0),
            ],
        )
        .expect("pauli combinations are Hermitian")
    }

    /// Projector `|k><k|` onto a computational basis state.
    pub fn basis_projector(dim: usize, k: usize) -> Result<Self, QuantumError> {
        if dim == 0 {
            return Err(QuantumError::EmptyMatrix);
        }
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut entries = vec![Complex64::ZERO; dim * dim];
        entries[k * dim + k] = Complex64::ONE;
        Self::from_rows(dim, entries)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Scaling by a real factor preserves hermiticity.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale_re(factor),
        }
    }

    /// Sum of Hermitian operators. Panics on dimension mismatch; the callers
    /// in this crate check dimensions when the generator is assembled.
    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.add(&other.matrix),
        }
    }

    /// Operator norm (largest absolute eigenvalue).
    pub fn operator_norm(&self) -> f64 {
        hermitian_eigensystem(self)
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, l| acc.max(l.abs()))
    }
}

/// Trace-one positive semidefinite Hermitian matrix: the quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(QuantumError::NotHermitian { max_deviation: dev });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_RE_TOL || trace.im.abs() > TRACE_IM_TOL {
            return Err(QuantumError::TraceNotOne {
                trace_re: trace.re,
                trace_im: trace.im,
            });
        }
        let min_eigenvalue = eigh(matrix.inner())
            .eigenvalues
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eigenvalue < EIGENVALUE_FLOOR {
            return Err(QuantumError::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            matrix,
            min_eigenvalue,
        })
    }

    /// Rank-one projector `|psi><psi|` from a normalized amplitude vector.
    ///
    /// The amplitudes must be unit-norm within 1e-10; they are then
    /// renormalized exactly so the resulting trace is one to rounding.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self, QuantumError> {
        if amplitudes.is_empty() {
            return Err(QuantumError::EmptyMatrix);
        }
        let norm = amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QuantumError::NotNormalized { norm });
        }
        let dim = amplitudes.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(amplitudes[i] * amplitudes[j].conj() / (norm * norm));
            }
        }
        Self::new(ComplexMatrix::from_rows(dim, entries)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, QuantumError> {
        if dim == 0 {
            return Err(QuantumError::EmptyMatrix);
        }
        Self::new(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
    }

    /// Qubit state `(I + x sx + y sy + z sz)/2` from a Bloch vector with
    /// norm at most one.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self, QuantumError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm > 1.0 + 1e-10 {
            return Err(QuantumError::NotPositive {
                min_eigenvalue: (1.0 - norm) / 2.0,
            });
        }
        let entries = vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ];
        Self::new(ComplexMatrix::from_rows(2, entries)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Smallest eigenvalue, computed once at construction.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `|Re tr - 1|` plus the imaginary leak, as a single scalar.
    pub fn trace_error(&self) -> f64 {
        let t = self.matrix.trace();
        (t.re - 1.0).abs().max(t.im.abs())
    }

    /// `Tr(rho^2)`; one for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// `(Tr(sx rho), Tr(sy rho), Tr(sz rho))` for a qubit.
    pub fn bloch_components(&self) -> Result<(f64, f64, f64), QuantumError> {
        if self.dim() != 2 {
            return Err(QuantumError::NotAQubit { dim: self.dim() });
        }
        let x = trace_inner(&HermitianOperator::pauli_x(), self)?;
        let y = trace_inner(&HermitianOperator::pauli_y(), self)?;
        let z = trace_inner(&HermitianOperator::pauli_z(), self)?;
        Ok((x, y, z))
    }
}

/// `a*b - b*a`.
pub fn commutator(a: &HermitianOperator, b: &ComplexMatrix) -> Result<ComplexMatrix, QuantumError> {
    a.matrix().check_same_dim(b)?;
    Ok(commutator_raw(a.matrix(), b))
}

pub(crate) fn commutator_raw(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b).sub(&b.matmul(a))
}

/// `Re Tr(a*rho)` for Hermitian `a`; the imaginary part must vanish.
pub fn trace_inner(a: &HermitianOperator, rho: &DensityMatrix) -> Result<f64, QuantumError> {
    a.matrix().check_same_dim(rho.matrix())?;
    let t = a.matrix().matmul(rho.matrix()).trace();
    assert!(
        t.im.abs() < 1e-10,
        "Tr(a*rho) for Hermitian a and a state rho must be real, got imaginary part {:e}",
        t.im
    );
    Ok(t.re)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn hermitian_eigensystem(a: &HermitianOperator) -> Eigensystem {
    eigh(a.matrix().inner())
}

/// Trace distance `||a - b||_1 / 2` between two states.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, QuantumError> {
    a.matrix().check_same_dim(b.matrix())?;
    let diff = a.matrix().sub(b.matrix());
    Ok(crate::linalg::hermitian_trace_norm(diff.inner()) / 2.0)
}
