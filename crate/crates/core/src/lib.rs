//! Classical simulation toolkit for quantum-assisted simulation of open
//! quantum systems.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; randomness is always drawn from a generator the
//! caller passes in.
//!
//! Layout:
//!
//! * [`qcore`]: statevectors, dense operators, Pauli strings and fixed gates.
//! * [`vectorize`]: density-matrix vectorization, Lindblad models and the
//!   non-Hermitian generator written as a positive linear combination of
//!   unitaries.
//! * [`ansatz`] and [`optimize`]: hardware-efficient circuits and a BFGS
//!   minimizer.
//! * [`vqsp`]: variational amplitude encoding of classical vectors.
//! * [`compile`]: the block-diagonal select unitary and its Hilbert-Schmidt
//!   compilation.
//! * [`evolve`]: Taylor/LCU time stepping with post-selection and the exact
//!   matrix-exponential reference.
//! * [`measure`]: observable readout on vectorized states.
//! * [`models`]: the damped two-level system, the two-site dissipative
//!   transverse-field Ising model and Kraus channels.
#![no_std]
// Negated comparisons are how NaN is made to fail the guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ansatz;
pub mod compile;
mod error;
pub mod evolve;
pub mod measure;
pub mod models;
pub mod optimize;
pub mod qcore;
pub mod random;
pub mod vectorize;
pub mod vqsp;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Absolute tolerance for complex equality checks.
pub const EPS: f64 = 1e-9;
