//! Simulation of a single qubit under the PT-symmetric non-Hermitian
//! Hamiltonian `H = (ω/2)σx + (iΓ/2)σz`.
//!
//! Three routes to the normalized non-unitary evolution `A_t|ψ⟩/‖A_t|ψ⟩‖`
//! are provided: the closed-form propagator ([`hamiltonian`]), a
//! Trotterized circuit with one postselected ancilla per step, and a
//! fixed-depth variational dilation trained by parameter-shift gradients
//! ([`vqc`]). [`experiments`] drives the figure-style runs behind the
//! `nonherm` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod linalg;
pub mod observables;
pub mod quantum;
pub mod tol;
pub mod vqc;

pub use error::{Error, Result};
pub use hamiltonian::{HeffParams, KrausMode, PtPhase};
pub use quantum::{DensityMatrix, PureState};
