//! Vectorized density operators and the Lindblad generator as a linear
//! combination of unitaries.
//!
//! A density matrix `ρ = Σ ρ_jk |j><k|` on `n` qubits is mapped to
//!
//! ```text
//! |ρ> = Σ_jk ρ_jk |k> ⊗ |j>
//! ```
//!
//! on `2n` qubits: the column index sits in the first register. With this
//! order `|AρB> = (Bᵀ ⊗ A)|ρ>`, so left multiplication acts on the second
//! register and right multiplication (transposed) on the first. The flat
//! index of `ρ_jk` is `k·N + j`.

mod generator;
mod lcu;
mod model;

pub use generator::{build_generator, generator_terms};
pub use lcu::{positivize, LcuOperator, LcuTerm};
pub use model::LindbladModel;

use alloc::vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use crate::qcore::{DenseOperator, StateVector};
use crate::{Error, Result, C64};

/// `|ρ>` with the column index in the first register.
pub fn vectorize_density(rho: &DenseOperator) -> StateVector {
    let n = rho.dim();
    let mut amps = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            amps[k * n + j] = rho.get(j, k);
        }
    }
    StateVector::new(amps).expect("square of a power of two")
}

/// Inverse of [`vectorize_density`].
pub fn devectorize(v: &StateVector) -> Result<DenseOperator> {
    if !v.num_qubits().is_multiple_of(2) {
        return Err(Error::InvalidArgument("vectorized state needs an even number of qubits".into()));
    }
    let n = 1usize << (v.num_qubits() / 2);
    let a = v.amplitudes();
    Ok(DenseOperator::from_fn(v.num_qubits() / 2, |j, k| a[k * n + j]))
}

/// `|I_N> = Σ_j |jj>`, divided by `√N` when `normalized` is set.
pub fn identity_vector(n: usize, normalized: bool) -> StateVector {
    assert!(n >= 1, "identity vector needs at least one system qubit");
    let dim = 1usize << n;
    let w = if normalized { 1.0 / (dim as f64).sqrt() } else { 1.0 };
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        amps[j * dim + j] = C64::new(w, 0.0);
    }
    StateVector::new(amps).expect("power of two")
}

/// `Tr ρ` read off a vectorized state.
pub fn trace_of(v: &StateVector) -> Result<C64> {
    identity_vector(v.num_qubits() / 2, false).inner(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates;
    use crate::random::{density_matrix, gaussian_c, seeded};
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ground_state_vectorizes_to_first_basis_vector() {
        let rho = DenseOperator::outer(&StateVector::zero(1), &StateVector::zero(1)).unwrap();
        assert_eq!(vectorize_density(&rho), StateVector::zero(2));
    }

    #[test]
    fn identity_vectorizes_to_bell_sum() {
        let v = vectorize_density(&DenseOperator::identity(1));
        assert_eq!(v.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(v, identity_vector(1, false));
    }

    #[test]
    fn plus_state_vectorizes_to_uniform_half() {
        let p = StateVector::plus(1);
        let v = vectorize_density(&DenseOperator::outer(&p, &p).unwrap());
        for a in v.amplitudes() {
            assert!((a - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_vector_norms() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(identity_vector(1, true).distance(&StateVector::from_real(&[s, 0.0, 0.0, s]).unwrap()).unwrap() < 1e-15);
        assert!((identity_vector(2, true).norm() - 1.0).abs() < 1e-15);
        let ground = vectorize_density(&DenseOperator::outer(&StateVector::zero(1), &StateVector::zero(1)).unwrap());
        assert_eq!(identity_vector(1, false).inner(&ground).unwrap(), c(1.0));
    }

    #[test]
    fn off_diagonal_element_lands_in_column_major_slot() {
        // ρ_01 = |0><1| sits at k·N + j = 1·2 + 0.
        let mut rho = DenseOperator::zeros(1);
        rho.set(0, 1, c(1.0));
        assert_eq!(vectorize_density(&rho), StateVector::basis(2, 2));
    }

    fn random_op(seed: u64, nq: usize) -> DenseOperator {
        let mut rng = seeded(seed);
        DenseOperator::from_fn(nq, |_, _| gaussian_c(&mut rng))
    }

    proptest! {
        #[test]
        fn round_trip(seed in 0u64..10_000, nq in 1usize..3) {
            let rho = density_matrix(&mut seeded(seed), nq);
            let back = devectorize(&vectorize_density(&rho)).unwrap();
            prop_assert_eq!(back, rho);
        }

        #[test]
        fn sandwich_identity(seed in 0u64..10_000, nq in 1usize..3) {
            let a = random_op(seed, nq);
            let b = random_op(seed + 1, nq);
            let rho = density_matrix(&mut seeded(seed + 2), nq);
            let lhs = vectorize_density(&a.matmul(&rho).unwrap().matmul(&b).unwrap());
            let rhs = b.transpose().tensor(&a).apply(&vectorize_density(&rho)).unwrap();
            prop_assert!(lhs.distance(&rhs).unwrap() < 1e-10);
        }

        #[test]
        fn trace_is_overlap_with_identity(seed in 0u64..10_000, nq in 1usize..3) {
            let m = random_op(seed, nq);
            let t = trace_of(&vectorize_density(&m)).unwrap();
            prop_assert!((t - m.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn hadamard_sandwich_example() {
        let h = gates::hadamard();
        let rho = density_matrix(&mut seeded(5), 1);
        let lhs = vectorize_density(&h.matmul(&rho).unwrap().matmul(&h).unwrap());
        let rhs = h.transpose().tensor(&h).apply(&vectorize_density(&rho)).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-14);
    }
}
