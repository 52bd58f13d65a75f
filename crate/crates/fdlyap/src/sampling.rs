//! Seeded random generators for states and operators.
//!
//! All randomness in this crate flows through [`ChaCha8Rng`] streams created
//! from explicit seeds, so every experiment and test is reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::quantum::{DensityMatrix, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed pure state of the given dimension.
pub fn random_pure_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    loop {
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            amplitudes.push(Complex64::new(re, im));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // essentially impossible, but keep the draw well-defined
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        return DensityMatrix::pure_state(&amplitudes).expect("normalized amplitudes");
    }
}

pub fn random_pure_qubit(rng: &mut ChaCha8Rng) -> DensityMatrix {
    random_pure_state(rng, 2)
}

/// Random Hermitian operator with entries on the order of `scale`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> HermitianOperator {
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        let d: f64 = rng.random_range(-1.0..1.0);
        entries[i * dim + i] = Complex64::new(scale * d, 0.0);
        for j in (i + 1)..dim {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            let z = Complex64::new(scale * re, scale * im);
            entries[i * dim + j] = z;
            entries[j * dim + i] = z.conj();
        }
    }
    HermitianOperator::from_rows(dim, entries).expect("Hermitian by construction")
}

/// Random full-rank mixed state (normalized Gram matrix of a random draw).
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let mut raw = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            raw[(i, j)] = Complex64::new(re, im);
        }
    }
    let gram = raw.adjoint() * &raw;
    let trace: Complex64 = gram.diagonal().iter().sum();
    let normalized = gram.map(|z| z / trace.re);
    DensityMatrix::new(crate::linalg::ComplexMatrix::from_inner(normalized))
        .expect("normalized Gram matrix is a state")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = rng(99);
        let mut b = rng(99);
        for _ in 0..10 {
            assert_eq!(
                random_pure_state(&mut a, 4).matrix(),
                random_pure_state(&mut b, 4).matrix()
            );
        }
    }

    #[test]
    fn random_density_is_full_trace() {
        let mut r = rng(3);
        for _ in 0..20 {
            let rho = random_density(&mut r, 3);
            assert!(rho.trace_error() < 1e-12);
            assert!(rho.min_eigenvalue() >= 0.0);
        }
    }
}
