use alloc::format;
use alloc::vec::Vec;

use crate::qcore::{sum_to_matrix, DenseOperator, PauliTerm, StateVector};
use crate::{Error, Result, C64};

/// Coefficients below this magnitude are dropped when positivizing.
pub const DROP_BELOW: f64 = 1e-12;

/// One weighted unitary `a_j Q_j`.
///
/// `paulis` is a Pauli-sum expansion of `Q_j` when one is known (a single
/// string with unit-modulus phase for generator terms) and empty otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuTerm {
    pub weight: f64,
    pub unitary: DenseOperator,
    pub paulis: Vec<PauliTerm>,
}

impl LcuTerm {
    /// A phased Pauli string `e^{iφ}P` with weight `a`.
    pub fn pauli(weight: f64, term: PauliTerm) -> Result<Self> {
        let unitary = term.to_matrix().into_unitary()?;
        Ok(Self { weight, unitary, paulis: alloc::vec![term] })
    }

    /// A unitary given as a sum of Pauli strings.
    pub fn pauli_sum(weight: f64, terms: Vec<PauliTerm>) -> Result<Self> {
        let nq = terms.first().map(|t| t.num_qubits()).ok_or_else(|| Error::InvalidArgument("empty Pauli sum".into()))?;
        let unitary = sum_to_matrix(&terms, nq)?.into_unitary()?;
        Ok(Self { weight, unitary, paulis: terms })
    }

    pub fn dense(weight: f64, unitary: DenseOperator) -> Result<Self> {
        Ok(Self { weight, unitary: unitary.into_unitary()?, paulis: Vec::new() })
    }

    pub fn identity(weight: f64, num_qubits: usize) -> Self {
        let term = PauliTerm::identity(num_qubits, C64::new(1.0, 0.0));
        Self { weight, unitary: DenseOperator::identity(num_qubits), paulis: alloc::vec![term] }
    }

    /// `Q_j |ψ>` (unweighted).
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if self.paulis.len() == 1 {
            self.paulis[0].apply(s)
        } else {
            self.unitary.apply(s)
        }
    }
}

/// `Σ_j a_j Q_j` with `a_j ≥ 0` and unitary `Q_j`, caching `A = Σ a_j` and
/// `A' = Σ a_j²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuOperator {
    num_qubits: usize,
    terms: Vec<LcuTerm>,
    a: f64,
    a_prime: f64,
}

impl LcuOperator {
    pub fn new(num_qubits: usize, terms: Vec<LcuTerm>) -> Result<Self> {
        for (j, t) in terms.iter().enumerate() {
            if !(t.weight.is_finite() && t.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("term {j} has weight {}", t.weight)));
            }
            if t.unitary.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch { expected: 1 << num_qubits, found: t.unitary.dim() });
            }
            if !t.unitary.is_unitary() {
                return Err(Error::NotUnitary(t.unitary.unitarity_defect()));
            }
        }
        let a = terms.iter().map(|t| t.weight).sum();
        let a_prime = terms.iter().map(|t| t.weight * t.weight).sum();
        Ok(Self { num_qubits, terms, a, a_prime })
    }

    pub fn empty(num_qubits: usize) -> Self {
        Self { num_qubits, terms: Vec::new(), a: 0.0, a_prime: 0.0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[LcuTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    /// `A = Σ a_j`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `A' = Σ a_j²`.
    pub fn a_prime(&self) -> f64 {
        self.a_prime
    }

    /// `log2` of the term count, when it is a power of two.
    pub fn num_ancillas(&self) -> Option<usize> {
        let n = self.terms.len();
        (n.is_power_of_two() && n >= 2).then(|| n.trailing_zeros() as usize)
    }

    /// Dense `Σ a_j Q_j`.
    pub fn dense(&self) -> DenseOperator {
        let mut out = DenseOperator::zeros(self.num_qubits);
        for t in &self.terms {
            out.add_scaled(C64::new(t.weight, 0.0), &t.unitary).expect("dimensions checked on construction");
        }
        out
    }

    /// `Σ a_j Q_j |ψ>`.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits, found: s.dim() });
        }
        let mut out = StateVector::new(alloc::vec![C64::new(0.0, 0.0); s.dim()])?;
        for t in &self.terms {
            let q = t.apply(s)?;
            for (o, v) in out.amplitudes_mut().iter_mut().zip(q.amplitudes()) {
                *o += v * t.weight;
            }
        }
        Ok(out)
    }
}

/// Split each `(c + id)·P` into `|c|·(±P)` and `|d|·(±iP)`, dropping parts
/// below [`DROP_BELOW`]. The returned strings carry the unit phase and the
/// weights are strictly positive.
pub fn positivize(terms: &[PauliTerm]) -> Vec<(f64, PauliTerm)> {
    let mut out = Vec::new();
    for t in terms {
        let (c, d) = (t.coeff.re, t.coeff.im);
        if c.abs() >= DROP_BELOW {
            out.push((c.abs(), PauliTerm::new(C64::new(c.signum(), 0.0), t.letters.clone())));
        }
        if d.abs() >= DROP_BELOW {
            out.push((d.abs(), PauliTerm::new(C64::new(0.0, d.signum()), t.letters.clone())));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Pauli;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn negative_real_coefficient_moves_into_unitary() {
        let out = positivize(&[PauliTerm::parse("X", c(-2.0, 0.0)).unwrap()]);
        assert_eq!(out, [(2.0, PauliTerm::parse("X", c(-1.0, 0.0)).unwrap())]);
    }

    #[test]
    fn imaginary_coefficient_becomes_phase() {
        let out = positivize(&[PauliTerm::parse("Z", c(0.0, 3.0)).unwrap()]);
        assert_eq!(out, [(3.0, PauliTerm::parse("Z", c(0.0, 1.0)).unwrap())]);
    }

    #[test]
    fn complex_coefficient_splits_in_two() {
        let input = [PauliTerm::parse("I", c(1.0, 1.0)).unwrap()];
        let out = positivize(&input);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], (1.0, PauliTerm::parse("I", c(1.0, 0.0)).unwrap()));
        assert_eq!(out[1], (1.0, PauliTerm::parse("I", c(0.0, 1.0)).unwrap()));
        let terms = out.into_iter().map(|(b, p)| LcuTerm::pauli(b, p).unwrap()).collect();
        let lcu = LcuOperator::new(1, terms).unwrap();
        assert!(lcu.dense().max_abs_diff(&sum_to_matrix(&input, 1).unwrap()) < 1e-15);
    }

    #[test]
    fn tiny_parts_are_dropped() {
        assert!(positivize(&[PauliTerm::parse("Y", c(1e-13, -1e-14)).unwrap()]).is_empty());
    }

    #[test]
    fn cached_sums() {
        let terms = [0.5, 0.25, 2.0].iter().map(|&w| LcuTerm::identity(w, 1)).collect();
        let lcu = LcuOperator::new(1, terms).unwrap();
        assert_eq!(lcu.a(), 2.75);
        assert_eq!(lcu.a_prime(), 0.25 + 0.0625 + 4.0);
    }

    #[test]
    fn rejects_negative_weight_and_non_unitary() {
        assert!(LcuOperator::new(1, alloc::vec![LcuTerm::identity(-1.0, 1)]).is_err());
        assert!(LcuTerm::pauli(1.0, PauliTerm::parse("X", c(0.5, 0.0)).unwrap()).is_err());
    }

    fn arb_term() -> impl Strategy<Value = PauliTerm> {
        let letter = prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)];
        (prop::collection::vec(letter, 2), -3.0..3.0f64, -3.0..3.0f64).prop_map(|(l, a, b)| PauliTerm::new(c(a, b), l))
    }

    proptest! {
        #[test]
        fn positivize_reassembles(terms in prop::collection::vec(arb_term(), 1..6)) {
            let pos = positivize(&terms);
            prop_assert!(pos.iter().all(|(b, _)| *b > 0.0));
            let lcu_terms = pos.into_iter().map(|(b, p)| LcuTerm::pauli(b, p).unwrap()).collect();
            let lcu = LcuOperator::new(2, lcu_terms).unwrap();
            let expected = sum_to_matrix(&terms, 2).unwrap();
            prop_assert!(lcu.dense().max_abs_diff(&expected) < 1e-11);
            let a: f64 = lcu.weights().iter().sum();
            prop_assert!((lcu.a() - a).abs() < 1e-12);
        }
    }
}
