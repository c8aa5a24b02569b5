//! Ground-state estimation with a Gaussian spectral filter built from a
//! linear combination of time evolutions.
//!
//! The pipeline is: build a Hamiltonian ([`pauli`]), prepare an initial
//! state ([`state`]), measure the overlap table `D_k`, `N_k` ([`overlap`]),
//! then post-process it classically with filter weights ([`filter`]) and a
//! parameter scan ([`scan`]). [`noise`] simulates the Hadamard-test circuits
//! under Pauli channels, [`cv`] models the qumode-assisted variant, and
//! [`resources`] evaluates shot and gate budgets.

pub mod cv;
pub mod error;
pub mod evolution;
pub mod filter;
mod gates;
pub mod noise;
pub mod overlap;
pub mod pauli;
pub mod quadrature;
pub mod resources;
pub mod scan;
pub mod spectrum;
pub mod state;

pub use error::{QgfError, Result};
pub use num_complex::Complex64;
