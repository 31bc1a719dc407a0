use alloc::format;
use alloc::vec::Vec;

use crate::qcore::{sum_to_matrix, DenseOperator, PauliTerm};
use crate::{Error, Result, C64};

/// `dρ/dt = −i[H, ρ] + Σ_r (L_r ρ L_r† − ½{L_r†L_r, ρ})` with `H` and every
/// `L_r` given as sums of Pauli strings on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    num_system_qubits: usize,
    hamiltonian: Vec<PauliTerm>,
    jump_operators: Vec<Vec<PauliTerm>>,
}

impl LindbladModel {
    /// Rejects `n = 0`, terms on the wrong number of qubits and Hamiltonian
    /// terms with complex coefficients.
    pub fn new(num_system_qubits: usize, hamiltonian: Vec<PauliTerm>, jump_operators: Vec<Vec<PauliTerm>>) -> Result<Self> {
        if num_system_qubits == 0 {
            return Err(Error::InvalidModel("model has no system qubits".into()));
        }
        let all = hamiltonian.iter().chain(jump_operators.iter().flatten());
        if let Some(t) = all.clone().find(|t| t.num_qubits() != num_system_qubits) {
            return Err(Error::InvalidModel(format!(
                "term {} acts on {} qubits, model has {}",
                t.label(),
                t.num_qubits(),
                num_system_qubits
            )));
        }
        if let Some(t) = all.clone().find(|t| !(t.coeff.re.is_finite() && t.coeff.im.is_finite())) {
            return Err(Error::InvalidModel(format!("term {} has a non-finite coefficient", t.label())));
        }
        if let Some(t) = hamiltonian.iter().find(|t| t.coeff.im.abs() > 1e-12) {
            return Err(Error::InvalidModel(format!("Hamiltonian term {} has a complex coefficient", t.label())));
        }
        let hamiltonian = hamiltonian.into_iter().map(|t| PauliTerm::new(C64::new(t.coeff.re, 0.0), t.letters)).collect();
        Ok(Self { num_system_qubits, hamiltonian, jump_operators })
    }

    pub fn num_system_qubits(&self) -> usize {
        self.num_system_qubits
    }

    pub fn hamiltonian(&self) -> &[PauliTerm] {
        &self.hamiltonian
    }

    pub fn jump_operators(&self) -> &[Vec<PauliTerm>] {
        &self.jump_operators
    }

    pub fn hamiltonian_matrix(&self) -> DenseOperator {
        sum_to_matrix(&self.hamiltonian, self.num_system_qubits).expect("validated on construction")
    }

    pub fn jump_matrices(&self) -> Vec<DenseOperator> {
        self.jump_operators.iter().map(|l| sum_to_matrix(l, self.num_system_qubits).expect("validated on construction")).collect()
    }

    /// Right-hand side of the master equation evaluated with dense matrices.
    pub fn lindblad_rhs(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        let h = self.hamiltonian_matrix();
        let mi = C64::new(0.0, -1.0);
        let mut out = h.matmul(rho)?.sub(&rho.matmul(&h)?)?.scale(mi);
        for l in self.jump_matrices() {
            let ld = l.adjoint();
            let ldl = ld.matmul(&l)?;
            out = out.add(&l.matmul(rho)?.matmul(&ld)?)?;
            out.add_scaled(C64::new(-0.5, 0.0), &ldl.matmul(rho)?)?;
            out.add_scaled(C64::new(-0.5, 0.0), &rho.matmul(&ldl)?)?;
        }
        Ok(out)
    }

    /// Vectorized generator assembled directly from dense `H` and `L_r`:
    /// `−i(I⊗H − Hᵀ⊗I) + Σ_r (L_r*⊗L_r − ½ I⊗L_r†L_r − ½ L_rᵀL_r*⊗I)`.
    pub fn superoperator(&self) -> DenseOperator {
        let n = self.num_system_qubits;
        let id = DenseOperator::identity(n);
        let h = self.hamiltonian_matrix();
        let half = C64::new(-0.5, 0.0);
        let mut out = id.tensor(&h).sub(&h.transpose().tensor(&id)).expect("same dimension").scale(C64::new(0.0, -1.0));
        for l in self.jump_matrices() {
            let ldl = l.adjoint().matmul(&l).expect("same dimension");
            let ltlc = l.transpose().matmul(&l.conj()).expect("same dimension");
            out.add_scaled(C64::new(1.0, 0.0), &l.conj().tensor(&l)).expect("same dimension");
            out.add_scaled(half, &id.tensor(&ldl)).expect("same dimension");
            out.add_scaled(half, &ltlc.tensor(&id)).expect("same dimension");
        }
        out
    }
}
