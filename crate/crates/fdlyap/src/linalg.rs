//! Dense complex linear algebra on small square matrices.
//!
//! Everything in this crate works on matrices of dimension ≤ a few dozen, so
//! storage is always dense and operations are direct. The eigendecomposition
//! is backed by a Hermitian solver; callers are expected to pass Hermitian
//! input (the typed wrappers in [`crate::quantum`] enforce this).

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub(crate) type CMat = DMatrix<Complex64>;

/// Errors raised by the quantum-core layer (matrix shapes and physical
/// invariants of operators and states).
#[derive(Debug, Clone, Error)]
pub enum QuantumError {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    BadEntryCount {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max deviation {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },
    #[error("trace is not one (re {trace_re}, im {trace_im})")]
    TraceNotOne { trace_re: f64, trace_im: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("amplitude vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("operation requires a qubit (dim 2), got dim {dim}")]
    NotAQubit { dim: usize },
}

/// Dense square complex matrix. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: CMat,
}

impl ComplexMatrix {
    /// Builds a `dim`x`dim` matrix from entries in row-major order.
    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Result<Self, QuantumError> {
        if dim == 0 {
            return Err(QuantumError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(QuantumError::BadEntryCount {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            inner: CMat::from_row_slice(dim, dim, &entries),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: CMat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: CMat::identity(dim, dim),
        }
    }

    pub(crate) fn from_inner(inner: CMat) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }

    pub(crate) fn inner(&self) -> &CMat {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_inner(self.inner.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.diagonal().iter().sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_inner(self.inner.map(|z| z * factor))
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_inner(&self.inner * &other.inner)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_inner(&self.inner + &other.inner)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_inner(&self.inner - &other.inner)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.inner - &other.inner)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max deviation from the conjugate transpose, `max_ij |a_ij - conj(a_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let dev = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `(A + A†)/2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_inner((&self.inner + self.inner.adjoint()).map(|z| z * 0.5))
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<(), QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix: `a = U diag(eigenvalues) U†`.
///
/// Eigenvalues are real and sorted ascending; column `k` of `eigenvectors`
/// is the eigenvector for `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigensystem {
    /// Rebuilds `U diag(eigenvalues) U†`; used to bound decomposition error.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut diag = CMat::zeros(n, n);
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            diag[(k, k)] = Complex64::new(*lam, 0.0);
        }
        let u = self.eigenvectors.inner();
        ComplexMatrix::from_inner(u * diag * u.adjoint())
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is assumed Hermitian; only its Hermitian part influences the
/// result. Matrices here are tiny, so the dense solver is always appropriate.
pub(crate) fn eigh(matrix: &CMat) -> Eigensystem {
    let n = matrix.nrows();
    let decomp = nalgebra::SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomp.eigenvalues[a]
            .partial_cmp(&decomp.eigenvalues[b])
            .expect("eigenvalues of a Hermitian matrix are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| decomp.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomp.eigenvectors.column(src));
    }
    Eigensystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_inner(vectors),
    }
}

/// Largest singular value, `sqrt(lambda_max(m† m))`.
pub(crate) fn spectral_norm(matrix: &CMat) -> f64 {
    let gram = matrix.adjoint() * matrix;
    let eig = eigh(&gram);
    eig.eigenvalues
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub(crate) fn hermitian_trace_norm(matrix: &CMat) -> f64 {
    eigh(matrix).eigenvalues.iter().map(|l| l.abs()).sum()
}
