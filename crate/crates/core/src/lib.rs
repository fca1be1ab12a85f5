//! Resource estimation for three ground-state energy algorithms (ADAPT-VQE,
//! quantum Krylov diagonalization and single-ancilla phase estimation) on
//! Pauli-sum Hamiltonians.
//!
//! The crate is layered bottom-up:
//!
//! * [`pauli`]: Pauli words, sums and the Jordan–Wigner transform.
//! * [`hamlib`]: Hubbard models, the Pauli text format and dense spectra.
//! * [`grouping`]: commuting measurement groups and shot estimates.
//! * [`circuit`] and [`routing`]: `{U, CNOT}` circuits, Trotter synthesis,
//!   gate accounting and SWAP routing.
//! * [`sim`]: dense state-vector simulation.
//! * [`krylov`], [`qpe`], [`adapt`]: the three algorithms.
//! * [`report`]: per-algorithm resource tables.

pub mod adapt;
pub mod circuit;
pub mod error;
pub mod grouping;
pub mod hamlib;
pub mod io;
pub mod krylov;
pub mod linalg;
pub mod optimize;
pub mod pauli;
pub mod qpe;
pub mod report;
pub mod routing;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
