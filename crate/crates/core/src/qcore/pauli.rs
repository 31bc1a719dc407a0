use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::operator::DenseOperator;
use super::state::StateVector;
use crate::{Error, Result, C64};

const ZERO_COEFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `self · other = phase · result`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (a, b) if a == b => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// `<r|σ|c>` for the single nonzero entry in column `c`.
    fn entry(self, col_bit: bool) -> C64 {
        match (self, col_bit) {
            (Pauli::I | Pauli::X, _) => C64::new(1.0, 0.0),
            (Pauli::Y, false) => C64::new(0.0, 1.0),
            (Pauli::Y, true) => C64::new(0.0, -1.0),
            (Pauli::Z, false) => C64::new(1.0, 0.0),
            (Pauli::Z, true) => C64::new(-1.0, 0.0),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `coeff · σ_{l_0} ⊗ σ_{l_1} ⊗ ...`, letter 0 on qubit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: C64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coeff: C64, letters: Vec<Pauli>) -> Self {
        Self { coeff, letters }
    }

    pub fn identity(num_qubits: usize, coeff: C64) -> Self {
        Self { coeff, letters: vec![Pauli::I; num_qubits] }
    }

    /// `coeff · σ_p` on `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, p: Pauli, coeff: C64) -> Self {
        let mut letters = vec![Pauli::I; num_qubits];
        letters[qubit] = p;
        Self { coeff, letters }
    }

    /// Parse a letter string such as `"XIZ"`.
    pub fn parse(letters: &str, coeff: C64) -> Result<Self> {
        let letters = letters
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidArgument(alloc::format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeff, letters })
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { coeff: self.coeff * c, letters: self.letters.clone() }
    }

    /// Symbolic product with phase tracking.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits(), found: other.num_qubits() });
        }
        let mut coeff = self.coeff * other.coeff;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (phase, p) = a.mul(b);
                coeff *= phase;
                p
            })
            .collect();
        Ok(Self { coeff, letters })
    }

    /// Entrywise complex conjugate (`Y* = −Y`).
    pub fn conj(&self) -> Self {
        Self { coeff: self.coeff.conj() * self.y_sign(), letters: self.letters.clone() }
    }

    /// Transpose (`Yᵀ = −Y`).
    pub fn transpose(&self) -> Self {
        Self { coeff: self.coeff * self.y_sign(), letters: self.letters.clone() }
    }

    pub fn adjoint(&self) -> Self {
        Self { coeff: self.coeff.conj(), letters: self.letters.clone() }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { coeff: self.coeff * other.coeff, letters }
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self.letters.iter().zip(&other.letters).filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b).count();
        anti % 2 == 0
    }

    /// Same letters, ignoring the coefficient.
    pub fn same_string(&self, other: &Self) -> bool {
        self.letters == other.letters
    }

    pub fn to_matrix(&self) -> DenseOperator {
        let nq = self.num_qubits();
        let dim = 1usize << nq;
        let mut op = DenseOperator::zeros(nq);
        let data = op.data_mut();
        for col in 0..dim {
            let (row, phase) = self.image(col);
            data[row * dim + col] = self.coeff * phase;
        }
        let unitary = (self.coeff.norm() - 1.0).abs() < 1e-12;
        if unitary {
            op.assume_unitary()
        } else {
            op
        }
    }

    /// Apply to a state without forming the matrix.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits(), found: s.dim() });
        }
        let amps = s.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (col, a) in amps.iter().enumerate() {
            let (row, phase) = self.image(col);
            out[row] = self.coeff * phase * a;
        }
        StateVector::new(out)
    }

    /// `σ|col> = phase |row>` for the bare string (no coefficient).
    fn image(&self, col: usize) -> (usize, C64) {
        let nq = self.num_qubits();
        let mut row = col;
        let mut phase = C64::new(1.0, 0.0);
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (nq - 1 - q);
            phase *= p.entry(col & bit != 0);
            if p.flips() {
                row ^= bit;
            }
        }
        (row, phase)
    }

    fn y_sign(&self) -> f64 {
        let ys = self.letters.iter().filter(|&&p| p == Pauli::Y).count();
        if ys % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i)·{}", self.coeff.re, self.coeff.im, self.label())
    }
}

/// Realize a Pauli term as a dense matrix.
pub fn pauli_to_matrix(term: &PauliTerm) -> Result<DenseOperator> {
    if term.letters.is_empty() {
        return Err(Error::InvalidArgument("Pauli term has no letters".into()));
    }
    Ok(term.to_matrix())
}

/// Merge terms with equal letter strings, keeping first-occurrence order,
/// and drop those whose coefficient falls below `1e-12`.
pub fn simplify(terms: &[PauliTerm]) -> Vec<PauliTerm> {
    let mut out: Vec<PauliTerm> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|o| o.same_string(t)) {
            Some(o) => o.coeff += t.coeff,
            None => out.push(t.clone()),
        }
    }
    out.retain(|t| t.coeff.norm() >= ZERO_COEFF);
    out
}

/// Dense matrix of `Σ terms` on `num_qubits` qubits.
pub fn sum_to_matrix(terms: &[PauliTerm], num_qubits: usize) -> Result<DenseOperator> {
    let dim = 1usize << num_qubits;
    let mut op = DenseOperator::zeros(num_qubits);
    let data = op.data_mut();
    for t in terms {
        if t.num_qubits() != num_qubits {
            return Err(Error::DimensionMismatch { expected: num_qubits, found: t.num_qubits() });
        }
        for col in 0..dim {
            let (row, phase) = t.image(col);
            data[row * dim + col] += t.coeff * phase;
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn z_is_diagonal() {
        let m = pauli_to_matrix(&PauliTerm::parse("Z", c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(m.data(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(m.is_unitary());
    }

    #[test]
    fn ii_is_identity() {
        let m = pauli_to_matrix(&PauliTerm::parse("II", c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(m, DenseOperator::identity(2));
    }

    #[test]
    fn ixy_corner_entry() {
        // σx⊗σy has -i at (0,3); times i gives 1.
        let m = pauli_to_matrix(&PauliTerm::parse("XY", c(0.0, 1.0)).unwrap()).unwrap();
        assert!((m.get(0, 3) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.get(3, 0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_term_is_rejected() {
        assert!(pauli_to_matrix(&PauliTerm::new(c(1.0, 0.0), Vec::new())).is_err());
    }

    #[test]
    fn scaled_term_is_not_unitary() {
        let m = PauliTerm::parse("X", c(0.5, 0.0)).unwrap().to_matrix();
        assert!(!m.is_unitary());
    }

    #[test]
    fn single_letter_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (c(0.0, 1.0), Pauli::Z));
        assert_eq!(Pauli::Z.mul(Pauli::X), (c(0.0, 1.0), Pauli::Y));
        assert_eq!(Pauli::Y.mul(Pauli::Y), (c(1.0, 0.0), Pauli::I));
    }

    #[test]
    fn simplify_merges_and_cancels() {
        let terms = [
            PauliTerm::parse("XI", c(1.0, 0.0)).unwrap(),
            PauliTerm::parse("IZ", c(2.0, 0.0)).unwrap(),
            PauliTerm::parse("XI", c(-1.0, 0.0)).unwrap(),
            PauliTerm::parse("IZ", c(0.0, 1.0)).unwrap(),
        ];
        let s = simplify(&terms);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label(), "IZ");
        assert_eq!(s[0].coeff, c(2.0, 1.0));
    }

    fn arb_pauli() -> impl Strategy<Value = Pauli> {
        prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
    }

    fn arb_term(n: usize) -> impl Strategy<Value = PauliTerm> {
        (prop::collection::vec(arb_pauli(), n), -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(letters, re, im)| PauliTerm::new(C64::new(re, im), letters))
    }

    proptest! {
        #[test]
        fn matrix_respects_product(
            (a, b) in (1usize..4).prop_flat_map(|n| (arb_term(n), arb_term(n)))
        ) {
            let lhs = a.to_matrix().matmul(&b.to_matrix()).unwrap();
            let rhs = a.mul(&b).unwrap().to_matrix();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn symbolic_conj_transpose_adjoint(a in (1usize..4).prop_flat_map(arb_term)) {
            let m = a.to_matrix();
            prop_assert!(a.conj().to_matrix().max_abs_diff(&m.conj()) < 1e-14);
            prop_assert!(a.transpose().to_matrix().max_abs_diff(&m.transpose()) < 1e-14);
            prop_assert!(a.adjoint().to_matrix().max_abs_diff(&m.adjoint()) < 1e-14);
        }

        #[test]
        fn commutation_matches_matrices(
            (a, b) in (1usize..4).prop_flat_map(|n| (arb_term(n), arb_term(n)))
        ) {
            let ab = a.to_matrix().matmul(&b.to_matrix()).unwrap();
            let ba = b.to_matrix().matmul(&a.to_matrix()).unwrap();
            let commute = ab.max_abs_diff(&ba) < 1e-12;
            let zero = a.coeff.norm() < 1e-9 || b.coeff.norm() < 1e-9;
            prop_assert!(zero || commute == a.commutes_with(&b));
        }

        #[test]
        fn tensor_matches_kronecker(
            (a, b) in (1usize..3, 1usize..3).prop_flat_map(|(n, k)| (arb_term(n), arb_term(k)))
        ) {
            let lhs = a.tensor(&b).to_matrix();
            let rhs = a.to_matrix().tensor(&b.to_matrix());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }

        #[test]
        fn apply_matches_matrix(a in (1usize..4).prop_flat_map(arb_term), seed in 0u64..1000) {
            let n = a.num_qubits();
            let amps = (0..1usize << n)
                .map(|k| C64::new(((k as u64 * 7 + seed) % 13) as f64, ((k as u64 + seed) % 5) as f64))
                .collect();
            let s = StateVector::new(amps).unwrap();
            let lhs = a.apply(&s).unwrap();
            let rhs = a.to_matrix().apply(&s).unwrap();
            prop_assert!(lhs.distance(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn sum_matches_individual_matrices(
            terms in (1usize..3).prop_flat_map(|n| prop::collection::vec(arb_term(n), 1..5))
        ) {
            let n = terms[0].num_qubits();
            let mut expected = DenseOperator::zeros(n);
            for t in &terms {
                expected = expected.add(&t.to_matrix()).unwrap();
            }
            let total = sum_to_matrix(&terms, n).unwrap();
            prop_assert!(total.max_abs_diff(&expected) < 1e-13);
            let merged = sum_to_matrix(&simplify(&terms), n).unwrap();
            prop_assert!(merged.max_abs_diff(&expected) < 1e-11);
        }
    }
}
