//! Complex linear-algebra substrate.
//!
//! Qubit 0 is the leftmost tensor factor and the most significant bit of a
//! basis label, so `|j1 j2 ... jq>` has index `j1 * 2^(q-1) + ... + jq`.

pub mod gates;
pub mod linalg;
pub mod local;
mod operator;
mod pauli;
mod state;

pub use operator::DenseOperator;
pub use pauli::{pauli_to_matrix, simplify, sum_to_matrix, Pauli, PauliTerm};
pub use state::{qubits_for_dim, StateVector};

/// Kronecker product of two operators.
pub fn tensor(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.tensor(b)
}

/// Matrix-vector product. Does not renormalize.
pub fn apply(op: &DenseOperator, s: &StateVector) -> crate::Result<StateVector> {
    op.apply(s)
}

/// `sum_i conj(a_i) b_i`.
pub fn inner(a: &StateVector, b: &StateVector) -> crate::Result<crate::C64> {
    a.inner(b)
}
