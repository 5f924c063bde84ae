//! Variational and exact ground states of the quantum Rabi model.
//!
//! The crate is organised bottom-up:
//!
//! * [`qops`]: truncated Fock-space and qubit operator algebra.
//! * [`model`]: the Rabi Hamiltonian, its frame transformations and derived scales.
//! * [`eig`]: eigensolvers and the Hilbert-space truncation policy.
//! * [`ansatz`]: non-orthogonal-qubit (NOQ), cat, ECS and DSS states; purity and Wigner functions.
//! * [`optimize`]: differential evolution plus fidelity and energy objectives.
//! * [`cli`]: batch sweeps, single-point reports and Wigner grids.
//!
//! Tensor products put the qubit on the slow index: amplitude `s * dim + n`
//! belongs to qubit state `s` (`0 = |+z⟩`, `1 = |−z⟩`) and Fock number `n`.

pub mod ansatz;
pub mod cli;
pub mod eig;
pub mod error;
pub mod model;
pub mod optimize;
pub mod qops;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
