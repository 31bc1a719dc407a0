use alloc::vec::Vec;

use super::lcu::{positivize, LcuOperator, LcuTerm};
use super::model::LindbladModel;
use crate::qcore::{simplify, PauliTerm};
use crate::{Result, C64};

/// The vectorized generator as a sum of Pauli strings on `2n` qubits, with
/// complex coefficients.
///
/// Terms appear in the order they are generated (Hamiltonian on the second
/// register, Hamiltonian on the first, then for each jump operator the
/// `L*⊗L`, `I⊗L†L` and `LᵀL*⊗I` products), equal strings merged into their
/// first occurrence, and the identity string moved to the end.
pub fn generator_terms(model: &LindbladModel) -> Vec<PauliTerm> {
    let n = model.num_system_qubits();
    let id = PauliTerm::identity(n, C64::new(1.0, 0.0));
    let mut raw = Vec::new();
    for h in model.hamiltonian() {
        raw.push(id.tensor(h).scale(C64::new(0.0, -1.0)));
    }
    for h in model.hamiltonian() {
        raw.push(h.transpose().tensor(&id).scale(C64::new(0.0, 1.0)));
    }
    let half = C64::new(-0.5, 0.0);
    for l in model.jump_operators() {
        for a in l {
            for b in l {
                raw.push(a.conj().tensor(b));
            }
        }
        for a in l {
            for b in l {
                let ldl = a.adjoint().mul(b).expect("validated on construction");
                raw.push(id.tensor(&ldl).scale(half));
            }
        }
        for a in l {
            for b in l {
                let ltlc = a.transpose().mul(&b.conj()).expect("validated on construction");
                raw.push(ltlc.tensor(&id).scale(half));
            }
        }
    }
    let (mut terms, ids): (Vec<_>, Vec<_>) = simplify(&raw).into_iter().partition(|t| !t.is_identity());
    terms.extend(ids);
    terms
}

/// Positive-weight LCU form `Σ b_j Ĥ_j` of the vectorized generator.
///
/// A model with no Hamiltonian terms and no jumps gives an empty operator.
pub fn build_generator(model: &LindbladModel) -> Result<LcuOperator> {
    let terms = positivize(&generator_terms(model)).into_iter().map(|(b, p)| LcuTerm::pauli(b, p)).collect::<Result<Vec<_>>>()?;
    LcuOperator::new(2 * model.num_system_qubits(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Pauli;
    use crate::random::{density_matrix, gaussian_c, seeded};
    use crate::vectorize::{devectorize, vectorize_density};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// A random one-qubit model: Hermitian `H` and one or two arbitrary jumps.
    fn random_model(seed: u64) -> LindbladModel {
        let mut rng = seeded(seed);
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let h = letters[1..].iter().map(|&p| PauliTerm::single(1, 0, p, c(rng.random_range(-2.0..2.0), 0.0))).collect();
        let jumps = (0..rng.random_range(1..3usize))
            .map(|_| letters.iter().map(|&p| PauliTerm::single(1, 0, p, gaussian_c(&mut rng))).collect())
            .collect();
        LindbladModel::new(1, h, jumps).unwrap()
    }

    #[test]
    fn empty_model_gives_empty_generator() {
        let m = LindbladModel::new(1, vec![], vec![]).unwrap();
        let g = build_generator(&m).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.num_qubits(), 2);
    }

    #[test]
    fn zero_qubit_model_is_rejected() {
        assert!(LindbladModel::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn complex_hamiltonian_coefficient_is_rejected() {
        let h = vec![PauliTerm::parse("X", c(1.0, 0.5)).unwrap()];
        assert!(LindbladModel::new(1, h, vec![]).is_err());
    }

    #[test]
    fn pure_dephasing_generator() {
        // L = √κ Z: generator is κ(Z⊗Z − I⊗I).
        let kappa = 0.3f64;
        let jump = vec![PauliTerm::parse("Z", c(kappa.sqrt(), 0.0)).unwrap()];
        let m = LindbladModel::new(1, vec![], vec![jump]).unwrap();
        let g = build_generator(&m).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g.terms()[0].weight - kappa).abs() < 1e-15);
        assert_eq!(g.terms()[0].paulis[0].label(), "ZZ");
        assert_eq!(g.terms()[1].paulis[0].coeff, c(-1.0, 0.0));
        assert!(g.terms()[1].paulis[0].is_identity());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn generator_reproduces_master_equation(seed in 0u64..100_000) {
            let m = random_model(seed);
            let g = build_generator(&m).unwrap();
            let rho = density_matrix(&mut seeded(seed ^ 0xabc), 1);
            let lhs = g.apply(&vectorize_density(&rho)).unwrap();
            let rhs = vectorize_density(&m.lindblad_rhs(&rho).unwrap());
            prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
            prop_assert!(g.dense().max_abs_diff(&m.superoperator()) < 1e-10);
            prop_assert!(g.terms().iter().all(|t| t.weight > 0.0));
        }

        #[test]
        fn generator_preserves_trace(seed in 0u64..100_000) {
            let m = random_model(seed);
            let rho = density_matrix(&mut seeded(seed + 7), 1);
            let d = devectorize(&build_generator(&m).unwrap().apply(&vectorize_density(&rho)).unwrap()).unwrap();
            prop_assert!(d.trace().norm() < 1e-10);
        }
    }
}
