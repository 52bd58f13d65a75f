//! Property tests over the crate's structural invariants.

use fdlyap::controller::ControllerState;
use fdlyap::dynamics::{step_exact_unitary, step_rk4, ControlInput, GeneratorSpec};
use fdlyap::measurement::{LyapunovObservable, NoiseMode, Povm};
use fdlyap::quantum::{DensityMatrix, HermitianOperator};
use fdlyap::sampling;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    /// Every emitted input respects saturation and gains never decrease,
    /// whatever Lyapunov values are fed in.
    #[test]
    fn sign_law_saturates_and_gains_grow(
        gains in proptest::collection::vec(0.01f64..5.0, 1..4),
        rates in proptest::collection::vec(0.01f64..2.0, 1..4),
        u_max in 0.1f64..3.0,
        values in proptest::collection::vec(0.0f64..1.0, 2..60),
    ) {
        let channels = gains.len().min(rates.len());
        let gains = gains[..channels].to_vec();
        let rates = rates[..channels].to_vec();
        let mut ctrl = ControllerState::sign_based(gains.clone(), rates, u_max).unwrap();
        let mut previous = ctrl.gains().to_vec();
        for v in values {
            let u = ctrl.sign_based_update(v);
            for &uk in u.values() {
                prop_assert!(uk.abs() <= u_max);
            }
            for (now, before) in ctrl.gains().iter().zip(&previous) {
                prop_assert!(now >= before);
            }
            previous = ctrl.gains().to_vec();
        }
    }

    /// Pure qubit states map to unit-norm Bloch vectors.
    #[test]
    fn pure_states_sit_on_the_bloch_sphere(
        re0 in -1.0f64..1.0, im0 in -1.0f64..1.0,
        re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
    ) {
        let a = Complex64::new(re0, im0);
        let b = Complex64::new(re1, im1);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        prop_assume!(norm > 1e-3);
        let rho = DensityMatrix::pure_state(&[a / norm, b / norm]).unwrap();
        let (x, y, z) = rho.bloch_components().unwrap();
        let r = (x * x + y * y + z * z).sqrt();
        prop_assert!((r - 1.0).abs() < 1e-10);
    }

    /// Projective outcome statistics are clipped probabilities summing to one
    /// for any state, pure or mixed.
    #[test]
    fn outcome_probabilities_are_a_distribution(seed in any::<u64>(), mixed in any::<bool>()) {
        let mut rng = sampling::rng(seed);
        let rho = if mixed {
            sampling::random_density(&mut rng, 2)
        } else {
            sampling::random_pure_qubit(&mut rng)
        };
        let povm = Povm::projective(&HermitianOperator::basis_projector(2, 0).unwrap()).unwrap();
        let probabilities = povm.outcome_probabilities(&rho).unwrap();
        let total: f64 = probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for p in probabilities {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    /// Both propagators preserve trace and positivity on random draws.
    #[test]
    fn propagation_keeps_states_physical(seed in any::<u64>(), dt in 0.05f64..1.0) {
        let mut rng = sampling::rng(seed);
        let drift = sampling::random_hermitian(&mut rng, 2, 0.5);
        let controls = vec![
            HermitianOperator::pauli_x().scale(0.5),
            HermitianOperator::pauli_y().scale(0.5),
        ];
        let rho = sampling::random_density(&mut rng, 2);
        let u = ControlInput::new(vec![0.3, -0.7]);

        let unitary = GeneratorSpec::unitary(drift.clone(), controls.clone()).unwrap();
        let stepped = step_exact_unitary(&unitary, &u, &rho, dt).unwrap();
        prop_assert!(stepped.trace_error() < 1e-9);
        prop_assert!(stepped.min_eigenvalue() >= -1e-8);

        let noisy = GeneratorSpec::new(
            drift,
            vec![fdlyap::dynamics::lowering_operator(0.5)],
            controls,
        )
        .unwrap();
        let stepped = step_rk4(&noisy, &u, &rho, dt, 64).unwrap();
        prop_assert!(stepped.trace_error() < 1e-9);
        prop_assert!(stepped.min_eigenvalue() >= -1e-8);
    }

    /// The exact readout of the Lyapunov observable always lies in [0, 1]
    /// and vanishes only at the target.
    #[test]
    fn exact_readout_is_proper_and_bounded(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let rho = sampling::random_pure_qubit(&mut rng);
        let obs = LyapunovObservable::new(
            HermitianOperator::basis_projector(2, 0).unwrap(),
            NoiseMode::Exact,
            0,
        )
        .unwrap();
        let v = obs.exact_value(&rho).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        prop_assert!(obs.is_proper_at(&rho).unwrap());
    }
}
