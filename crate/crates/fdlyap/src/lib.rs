//! Model-free stabilization of finite-dimensional quantum states, driven
//! entirely by sampled finite differences of a measurement-derived Lyapunov
//! observable.
//!
//! The plant is a density matrix evolving under an unknown drift Hamiltonian,
//! optional Lindblad noise, and known control Hamiltonians with
//! zero-order-hold inputs. The controller never sees the state or the
//! generator: it receives one scalar Lyapunov readout per sampling instant
//! (exact, finite-shot, or boundedly corrupted) and chooses the next constant
//! input either from the sign of the latest finite difference with adaptive
//! gain amplification, or from a pseudo-gradient assembled out of one-step
//! probe evaluations.
//!
//! ```
//! use fdlyap::presets;
//!
//! // Stabilize a qubit from the south pole with the double-probe law.
//! let preset = presets::find("qubit-driftfree").unwrap();
//! let log = preset.run_single().unwrap();
//! assert!(log.final_v_exact() < 1e-3);
//! ```
//!
//! The `examples/` directory walks through each capability; the `fdlyap`
//! binary exposes the same experiments as `run-preset`, `run-config`,
//! `verify`, and `list-presets`.

pub mod analysis;
pub mod cli;
pub mod closed_loop;
pub mod config;
pub mod controller;
pub mod dynamics;
pub mod linalg;
pub mod measurement;
pub mod presets;
pub mod quantum;
pub mod report;
pub mod sampling;
pub mod verification;

pub use analysis::{DescentReport, IssReport, NoiseRobustness, SteadyState};
pub use closed_loop::{run_batch, run_closed_loop, LoopConfig, ProbeStyle, TrajectoryLog};
pub use controller::{ControllerMode, ControllerState, ProbeOracle};
pub use dynamics::{ControlInput, GeneratorSpec, Integrator};
pub use linalg::{ComplexMatrix, Eigensystem, QuantumError};
pub use measurement::{LyapunovObservable, NoiseMode, Povm};
pub use quantum::{DensityMatrix, HermitianOperator};
