//! Verification of many-qubit quantum states with single-qubit Pauli
//! measurements, simulated exactly on dense state vectors and density
//! matrices.
//!
//! Three protocols are provided: ground states of Pauli-sum Hamiltonians,
//! states `U|+>^N` whose stabilizers `U X_i U^†` have tractable Pauli
//! decompositions, and hypergraph states verified with the adaptive
//! stabilizer test. Each single-copy test has a sampled path (the verifier's
//! measurements drawn from the Born rule) and a closed-form pass probability.
//!
//! Monte Carlo batches run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise. Every random draw comes from a
//! stream derived from `(seed, tags...)`, so results do not depend on the
//! thread count.

pub mod analysis;
pub mod circuit;
pub mod decompose;
mod error;
pub mod exact;
pub mod hamiltonian;
pub mod hypergraph;
pub mod io;
pub mod kernels;
pub mod measure;
pub mod par;
pub mod pauli;
pub mod protocol;
pub mod random;
pub mod report;
pub mod rng;
pub mod selftest;
pub mod state;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use num_complex::Complex64;
pub use num_rational::BigRational;

/// Largest register width simulated as a state vector.
pub const PURE_CAP: usize = 16;
/// Largest register width simulated as a density matrix or decomposed into
/// all `4^N` Pauli strings.
pub const DENSITY_CAP: usize = 8;
/// Coefficients at or below this magnitude are treated as zero.
pub const DROP_THRESHOLD: f64 = 1e-12;
