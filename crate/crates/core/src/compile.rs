//! The select operator `Λ_Q = Σ_j |j><j| ⊗ Q_j` and its variational
//! compilation under the Hilbert-Schmidt cost
//! `G(β) = 1 − |Tr(V(β)† Λ_Q)|² / d²`.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::ansatz::{Op, ParameterizedCircuit};
use crate::optimize::{minimize, Objective, OptOptions, OptResult};
use crate::qcore::local::LocalGate;
use crate::qcore::{simplify, DenseOperator, Pauli, PauliTerm};
use crate::random::haar_state;
use crate::vectorize::LcuOperator;
use crate::{Error, Result, C64};

/// Block-diagonal unitary with the ancilla register first: block `j`
/// occupies rows and columns `[j·s, (j+1)·s)` for block size `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalUnitary {
    blocks: Vec<DenseOperator>,
    dense: DenseOperator,
    num_ancillas: usize,
}

impl BlockDiagonalUnitary {
    pub fn from_blocks(blocks: Vec<DenseOperator>) -> Result<Self> {
        let count = blocks.len();
        if count < 2 || !count.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(count));
        }
        let s = blocks[0].dim();
        let m = count.trailing_zeros() as usize;
        let nq = blocks[0].num_qubits();
        let mut dense = DenseOperator::zeros(m + nq);
        let d = dense.dim();
        {
            let data = dense.data_mut();
            for (j, b) in blocks.iter().enumerate() {
                if b.dim() != s {
                    return Err(Error::DimensionMismatch { expected: s, found: b.dim() });
                }
                if !b.is_unitary() && b.unitarity_defect() >= 1e-9 {
                    return Err(Error::NotUnitary(b.unitarity_defect()));
                }
                for r in 0..s {
                    data[(j * s + r) * d + j * s..(j * s + r) * d + (j + 1) * s].copy_from_slice(&b.data()[r * s..(r + 1) * s]);
                }
            }
        }
        Ok(Self { blocks, dense: dense.assume_unitary(), num_ancillas: m })
    }

    pub fn blocks(&self) -> &[DenseOperator] {
        &self.blocks
    }

    pub fn dense(&self) -> &DenseOperator {
        &self.dense
    }

    pub fn num_ancillas(&self) -> usize {
        self.num_ancillas
    }

    pub fn num_qubits(&self) -> usize {
        self.dense.num_qubits()
    }
}

/// `Λ_Q` for an LCU with `2^m` terms.
pub fn build_select(lcu: &LcuOperator) -> Result<BlockDiagonalUnitary> {
    BlockDiagonalUnitary::from_blocks(lcu.terms().iter().map(|t| t.unitary.clone()).collect())
}

/// Pauli expansion of `Λ_Q`: each `|j><j|` becomes
/// `2^{-m} ⊗_g (I + (−1)^{j_g} Z)`, multiplied out against the Pauli
/// expansion of `Q_j`, with equal strings merged.
pub fn pauli_expand_select(lcu: &LcuOperator) -> Result<Vec<PauliTerm>> {
    let count = lcu.len();
    if count < 2 || !count.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(count));
    }
    let m = count.trailing_zeros() as usize;
    let w = 1.0 / count as f64;
    let mut raw = Vec::new();
    for (j, term) in lcu.terms().iter().enumerate() {
        if term.paulis.is_empty() {
            return Err(Error::InvalidArgument(alloc::format!("block {j} has no Pauli expansion")));
        }
        for subset in 0..count {
            let mut sign = 1.0;
            let letters: Vec<Pauli> = (0..m)
                .map(|g| {
                    let bit = m - 1 - g;
                    if subset >> bit & 1 == 1 {
                        if j >> bit & 1 == 1 {
                            sign = -sign;
                        }
                        Pauli::Z
                    } else {
                        Pauli::I
                    }
                })
                .collect();
            let anc = PauliTerm::new(C64::new(sign * w, 0.0), letters);
            for p in &term.paulis {
                raw.push(anc.tensor(p));
            }
        }
    }
    Ok(simplify(&raw))
}

/// `G = 1 − |Tr(V†U)|²/d²`.
pub fn hs_distance(v: &DenseOperator, target: &DenseOperator) -> Result<f64> {
    if v.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: v.dim() });
    }
    let d = v.dim() as f64;
    let tr: C64 = v.data().iter().zip(target.data()).map(|(a, b)| a.conj() * b).sum();
    Ok((1.0 - tr.norm_sqr() / (d * d)).clamp(0.0, 1.0))
}

/// Hilbert-Schmidt cost of `circuit(params)` against the target.
pub fn hst_cost(params: &[f64], target: &BlockDiagonalUnitary, circuit: &ParameterizedCircuit) -> Result<f64> {
    if circuit.num_qubits() != target.num_qubits() {
        return Err(Error::DimensionMismatch { expected: target.num_qubits(), found: circuit.num_qubits() });
    }
    hs_distance(&circuit.evaluate_unitary(params)?, target.dense())
}

/// The Hilbert-Schmidt cost as an optimizer objective.
///
/// The gradient is a central difference in each angle, but each difference
/// is evaluated by contracting the perturbed gate against its environment
/// rather than re-simulating the circuit. With `V = G_K ⋯ G_1` and
/// `T = Tr(V†Λ)`, define `R_1 = G_1 V†Λ` and `R_{k+1} = G_{k+1} R_k G_k†`;
/// then `T = Tr(R_k G_k†)` for every `k`, and only `G_k` changes when its
/// angle moves.
pub struct HstObjective<'a> {
    target: &'a DenseOperator,
    circuit: &'a ParameterizedCircuit,
}

impl<'a> HstObjective<'a> {
    pub fn new(target: &'a BlockDiagonalUnitary, circuit: &'a ParameterizedCircuit) -> Result<Self> {
        Self::for_operator(target.dense(), circuit)
    }

    /// Any target unitary, not only select operators.
    pub fn for_operator(target: &'a DenseOperator, circuit: &'a ParameterizedCircuit) -> Result<Self> {
        if circuit.num_qubits() != target.num_qubits() {
            return Err(Error::DimensionMismatch { expected: target.num_qubits(), found: circuit.num_qubits() });
        }
        Ok(Self { target, circuit })
    }

    fn d2(&self) -> f64 {
        let d = self.target.dim() as f64;
        d * d
    }
}

impl Objective for HstObjective<'_> {
    fn cost(&self, x: &[f64]) -> f64 {
        match self.circuit.evaluate_unitary(x) {
            Ok(v) => hs_distance(&v, self.target).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    }

    fn cost_and_gradient(&self, x: &[f64], step: f64, grad: &mut [f64]) -> f64 {
        let Ok(ops) = self.circuit.ops(x) else { return f64::NAN };
        let nq = self.circuit.num_qubits();
        let d = self.target.dim();
        let mut v = DenseOperator::identity(nq);
        for op in &ops {
            v.left_apply_local(&op.gate);
        }
        // R = V†Λ, then peel off the first gate.
        let mut r = v.adjoint().matmul(self.target).expect("dimensions checked");
        let tr: C64 = r.trace();
        let d2 = self.d2();
        let cost = (1.0 - tr.norm_sqr() / d2).clamp(0.0, 1.0);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut prev: Option<&Op> = None;
        for op in &ops {
            r.left_apply_local(&op.gate);
            if let Some(p) = prev {
                r.right_apply_local(&p.gate.adjoint());
            }
            prev = Some(op);
            let Some(k) = op.param else { continue };
            let env = op.gate.environment(r.data(), d, nq);
            let at = |theta: f64| -> f64 {
                let g: LocalGate = op.with_angle(theta).adjoint();
                1.0 - g.contract(&env).norm_sqr() / d2
            };
            grad[k] = (at(x[k] + step) - at(x[k] - step)) / (2.0 * step);
        }
        cost
    }
}

/// Minimize the Hilbert-Schmidt cost from a seeded start.
pub fn train_compiler(target: &BlockDiagonalUnitary, circuit: &ParameterizedCircuit, init: &[f64], opts: &OptOptions) -> Result<OptResult> {
    let obj = HstObjective::new(target, circuit)?;
    minimize(&obj, init, opts)
}

/// Exact Haar-averaged fidelity `∫ |<ψ|V†U|ψ>|² dψ = (|Tr(V†U)|² + d)/(d(d+1))`.
pub fn average_fidelity(v: &DenseOperator, target: &DenseOperator) -> Result<f64> {
    let g = hs_distance(v, target)?;
    let d = v.dim() as f64;
    Ok(((1.0 - g) * d * d + d) / (d * (d + 1.0)))
}

/// Sampled estimate of the Haar-averaged fidelity over `samples` random
/// input states.
pub fn sampled_average_fidelity<R: Rng + ?Sized>(v: &DenseOperator, target: &DenseOperator, rng: &mut R, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut acc = 0.0;
    for _ in 0..samples {
        let psi = haar_state(rng, v.num_qubits());
        acc += v.apply(&psi)?.fidelity(&target.apply(&psi)?)?;
    }
    Ok(acc / samples as f64)
}

/// Zero vector of the right length for a circuit, for starting from `V = I`
/// where the ansatz allows it.
pub fn zero_params(circuit: &ParameterizedCircuit) -> Vec<f64> {
    vec![0.0; circuit.parameter_count()]
}
