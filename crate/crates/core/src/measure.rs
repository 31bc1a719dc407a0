//! Observable readout on vectorized states.
//!
//! For a vectorized (possibly unnormalized) state `|ρ>`,
//! `<M> = <I_N|(I⊗M)|ρ> / <I_N|ρ>`, which is `Tr(Mρ)/Tr(ρ)` and so does not
//! care how `|ρ>` or `|I_N>` are scaled.

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

use crate::qcore::linalg::complete_to_unitary;
use crate::qcore::{DenseOperator, Pauli, PauliTerm, StateVector};
use crate::vectorize::identity_vector;
use crate::{Error, Result, C64};

/// Imaginary residue tolerated by [`expectation_direct`].
pub const IMAG_TOL: f64 = 1e-8;

/// `Σ w_j M_j` with real weights and unit-coefficient Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    num_qubits: usize,
    terms: Vec<(f64, PauliTerm)>,
}

impl Observable {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliTerm)>) -> Result<Self> {
        for (w, t) in &terms {
            if t.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch { expected: num_qubits, found: t.num_qubits() });
            }
            if !w.is_finite() || (t.coeff - C64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(Error::InvalidArgument(format!("observable term {w}·{t} is not a real multiple of a Pauli string")));
            }
        }
        Ok(Self { num_qubits, terms })
    }

    /// `σ_p` on one qubit of an `n`-qubit system.
    pub fn single(num_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let t = PauliTerm::single(num_qubits, qubit, p, C64::new(1.0, 0.0));
        Self { num_qubits, terms: alloc::vec![(1.0, t)] }
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self { num_qubits, terms: alloc::vec![(1.0, PauliTerm::identity(num_qubits, C64::new(1.0, 0.0)))] }
    }

    /// `(1/n) Σ_k σ_z^(k)`.
    pub fn magnetization(num_qubits: usize) -> Self {
        let w = 1.0 / num_qubits as f64;
        let terms = (0..num_qubits).map(|q| (w, PauliTerm::single(num_qubits, q, Pauli::Z, C64::new(1.0, 0.0)))).collect();
        Self { num_qubits, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliTerm)] {
        &self.terms
    }

    pub fn matrix(&self) -> DenseOperator {
        let mut m = DenseOperator::zeros(self.num_qubits);
        for (w, t) in &self.terms {
            m.add_scaled(C64::new(*w, 0.0), &t.to_matrix()).expect("same dimension");
        }
        m
    }

    /// `I ⊗ M_j` acting on the row register of a vectorized state.
    fn lifted(&self) -> impl Iterator<Item = (f64, PauliTerm)> + '_ {
        let id = PauliTerm::identity(self.num_qubits, C64::new(1.0, 0.0));
        self.terms.iter().map(move |(w, t)| (*w, id.tensor(t)))
    }
}

/// `<I_N|(I⊗M)|ρ> / <I_N|ρ>` without discarding the imaginary part.
pub fn expectation_complex(rho_vec: &StateVector, m: &Observable) -> Result<C64> {
    if rho_vec.num_qubits() != 2 * m.num_qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << (2 * m.num_qubits()), found: rho_vec.dim() });
    }
    let id = identity_vector(m.num_qubits(), false);
    let den = id.inner(rho_vec)?;
    if den.norm() <= 1e-12 * rho_vec.norm() || den.norm() == 0.0 {
        return Err(Error::Traceless(den.norm()));
    }
    let mut num = C64::new(0.0, 0.0);
    for (w, t) in m.lifted() {
        num += id.inner(&t.apply(rho_vec)?)? * w;
    }
    Ok(num / den)
}

/// Real expectation value; fails when the ratio has an imaginary part above
/// [`IMAG_TOL`], which a valid (Hermitian) vectorized state never produces.
pub fn expectation_direct(rho_vec: &StateVector, m: &Observable) -> Result<f64> {
    let v = expectation_complex(rho_vec, m)?;
    if v.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(v.re)
}

/// Outcome probabilities of a Hadamard test comparing `A|0>` and `B|0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardOutcome {
    /// `P(0) = (1 + Re<A0|B0>)/2`.
    pub p0: f64,
    /// With an `S` gate on the ancilla: `P(0) = (1 − Im<A0|B0>)/2`.
    pub p0_phase: Option<f64>,
}

impl HadamardOutcome {
    /// `<A0|B0>` recovered from the probabilities.
    pub fn overlap(&self) -> C64 {
        C64::new(2.0 * self.p0 - 1.0, 1.0 - 2.0 * self.p0_phase.unwrap_or(0.5))
    }
}

/// Simulate the interference circuit: ancilla in `|+>`, `A` on the system
/// for ancilla `|0>` and `B` for ancilla `|1>`, optional `S` on the ancilla,
/// then `H` and a measurement of the ancilla.
pub fn hadamard_test(prep_a: &DenseOperator, prep_b: &DenseOperator, phase_variant: bool) -> Result<HadamardOutcome> {
    if prep_a.dim() != prep_b.dim() {
        return Err(Error::DimensionMismatch { expected: prep_a.dim(), found: prep_b.dim() });
    }
    let zero = StateVector::zero(prep_a.num_qubits());
    let a0 = prep_a.apply(&zero)?;
    let b0 = prep_b.apply(&zero)?;
    let run = |phase: C64| {
        // After H on the ancilla the |0> branch holds (A0 + phase·B0)/2.
        a0.amplitudes().iter().zip(b0.amplitudes()).map(|(a, b)| ((a + phase * b) * 0.5).norm_sqr()).sum::<f64>()
    };
    let p0 = run(C64::new(1.0, 0.0));
    let p0_phase = phase_variant.then(|| run(C64::new(0.0, 1.0)));
    Ok(HadamardOutcome { p0, p0_phase })
}

/// Replace an exact probability by the frequency of `shots` Bernoulli draws.
pub fn sample_probability<R: Rng + ?Sized>(rng: &mut R, p: f64, shots: usize) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let hits = (0..shots).filter(|_| rng.random::<f64>() < p).count();
    Ok(hits as f64 / shots as f64)
}

/// Protocol A: estimate `<M>` from Hadamard tests between a preparation of
/// `|I_N>` and preparations of `|ρ>` and `(I⊗M_j)|ρ>`.
///
/// The preparation unitaries are built by basis completion from the
/// normalized vectors.
pub fn protocol_a_expectation(rho_vec: &StateVector, m: &Observable) -> Result<f64> {
    let n = m.num_qubits();
    if rho_vec.num_qubits() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 1 << (2 * n), found: rho_vec.dim() });
    }
    let u_i = complete_to_unitary(&identity_vector(n, true))?;
    let u_rho = complete_to_unitary(&rho_vec.normalized()?)?;
    let den = hadamard_test(&u_i, &u_rho, true)?.overlap();
    if den.norm() < 1e-12 {
        return Err(Error::Traceless(den.norm()));
    }
    let mut num = C64::new(0.0, 0.0);
    for (w, t) in m.lifted() {
        let b = t.to_matrix().matmul(&u_rho)?;
        num += hadamard_test(&u_i, &b, true)?.overlap() * w;
    }
    let v = num / den;
    if v.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(v.re)
}

/// Solve `a c − b d = 2P0 − 1`, `b c + a d = 1 − 2P0'` for `(c, d)`.
pub fn solve_linear(a: f64, b: f64, p0: f64, p0_phase: f64) -> Result<(f64, f64)> {
    let det = a * a + b * b;
    if !(det > 1e-20) {
        return Err(Error::Singular);
    }
    let u = 2.0 * p0 - 1.0;
    let v = 1.0 - 2.0 * p0_phase;
    Ok(((a * u + b * v) / det, (a * v - b * u) / det))
}

/// Hadamard-test probabilities whose inner product is `r·x`.
fn protocol_b_probabilities(r: C64, x: C64) -> (f64, f64) {
    let z = r * x;
    ((1.0 + z.re) / 2.0, (1.0 - z.im) / 2.0)
}

/// Protocol B: read `<M>` off the pre-measurement state
/// `|Ψ> = W|0^m>|ρ(t−Δt)>` (ancillas first) without post-selecting.
///
/// Each lifted term `|0^m><0^m| ⊗ (I⊗M_i)` is expanded into `2^m` Pauli
/// strings `2^{-m} Z_S ⊗ (I⊗M_i)`. For each string the interference
/// probabilities are simulated against the reference overlap
/// `rho_overlap = <ρ(t−Δt)|I_N>`, the linear system is solved for the
/// amplitude, and the amplitudes are combined and divided by the same
/// quantity for `M = I`.
pub fn protocol_b_expectation(psi: &StateVector, m: &Observable, rho_overlap: C64) -> Result<f64> {
    let n = m.num_qubits();
    let total = psi.num_qubits();
    if total <= 2 * n {
        return Err(Error::InvalidArgument(format!("state on {total} qubits has no ancilla register for a {n}-qubit observable")));
    }
    let anc = total - 2 * n;
    let reference = StateVector::zero(anc).tensor(&identity_vector(n, true));
    let (a, b) = (rho_overlap.re, rho_overlap.im);
    let amplitude = |system: &PauliTerm| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for subset in 0..1usize << anc {
            let letters = (0..anc).map(|g| if subset >> (anc - 1 - g) & 1 == 1 { Pauli::Z } else { Pauli::I });
            let z = PauliTerm::new(C64::new(1.0, 0.0), letters.collect());
            let x = reference.inner(&z.tensor(system).apply(psi)?)?;
            let (p0, p0_phase) = protocol_b_probabilities(rho_overlap, x);
            let (c, d) = solve_linear(a, b, p0, p0_phase)?;
            acc += C64::new(c, d);
        }
        Ok(acc / (1usize << anc) as f64)
    };
    let id = PauliTerm::identity(2 * n, C64::new(1.0, 0.0));
    let den = amplitude(&id)?;
    if den.norm() < 1e-14 {
        return Err(Error::Traceless(den.norm()));
    }
    let mut num = C64::new(0.0, 0.0);
    for (w, t) in m.lifted() {
        num += amplitude(&t)? * w;
    }
    let v = num / den;
    if v.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(v.re)
}
