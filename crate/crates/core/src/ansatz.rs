//! Hardware-efficient parameterized circuits.
//!
//! A circuit is a stack of layers. Each layer applies a rotation block to
//! every qubit and then an entangler ladder in which qubit `i` controls
//! qubit `i + 1`.

use alloc::vec::Vec;

use crate::qcore::gates;
use crate::qcore::local::LocalGate;
use crate::qcore::{DenseOperator, StateVector};
use crate::{Error, Result};

pub use crate::optimize::{minimize, minimize_from, minimize_observed, restart_inits, Objective, OptOptions, OptResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    /// `Ry(θ)` per qubit.
    Ry,
    /// `Rz(θ3) Ry(θ2) Rz(θ1)` per qubit, `θ1` applied first.
    RzRyRz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    None,
    Cnot,
    Cz,
    /// Parameterized controlled `Ry`.
    Cry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layer {
    pub rotation: Rotation,
    pub entangler: Entangler,
}

impl Layer {
    pub fn parameter_count(&self, num_qubits: usize) -> usize {
        let rot = match self.rotation {
            Rotation::Ry => num_qubits,
            Rotation::RzRyRz => 3 * num_qubits,
        };
        let ent = match self.entangler {
            Entangler::Cry => num_qubits.saturating_sub(1),
            _ => 0,
        };
        rot + ent
    }
}

/// Which angle-dependent matrix a gate carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Ry,
    Rz,
    Cry,
    Fixed,
}

/// One gate of an expanded circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op {
    pub gate: LocalGate,
    pub kind: GateKind,
    /// Index into the parameter vector, for parameterized gates.
    pub param: Option<usize>,
}

impl Op {
    /// The same gate with its angle replaced.
    pub fn with_angle(&self, theta: f64) -> LocalGate {
        match (self.kind, self.gate) {
            (GateKind::Ry, LocalGate::One { qubit, .. }) => gates::ry_local(qubit, theta),
            (GateKind::Rz, LocalGate::One { qubit, .. }) => gates::rz_local(qubit, theta),
            (GateKind::Cry, LocalGate::Two { q0, q1, .. }) => gates::cry_local(q0, q1, theta),
            _ => self.gate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedCircuit {
    num_qubits: usize,
    layers: Vec<Layer>,
    parameter_count: usize,
}

impl ParameterizedCircuit {
    pub fn new(num_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        let parameter_count = layers.iter().map(|l| l.parameter_count(num_qubits)).sum();
        Ok(Self { num_qubits, layers, parameter_count })
    }

    /// `depth` identical layers.
    pub fn hardware_efficient(num_qubits: usize, depth: usize, rotation: Rotation, entangler: Entangler) -> Result<Self> {
        Self::new(num_qubits, alloc::vec![Layer { rotation, entangler }; depth])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_count
    }

    /// Expand into gates in application order.
    pub fn ops(&self, params: &[f64]) -> Result<Vec<Op>> {
        self.check_params(params)?;
        let n = self.num_qubits;
        let mut ops = Vec::new();
        let mut next = params.iter().copied().enumerate();
        let mut param = |kind: GateKind, make: &dyn Fn(f64) -> LocalGate| {
            let (k, theta) = next.next().expect("parameter count checked");
            Op { gate: make(theta), kind, param: Some(k) }
        };
        for layer in &self.layers {
            for q in 0..n {
                match layer.rotation {
                    Rotation::Ry => ops.push(param(GateKind::Ry, &|t| gates::ry_local(q, t))),
                    Rotation::RzRyRz => {
                        ops.push(param(GateKind::Rz, &|t| gates::rz_local(q, t)));
                        ops.push(param(GateKind::Ry, &|t| gates::ry_local(q, t)));
                        ops.push(param(GateKind::Rz, &|t| gates::rz_local(q, t)));
                    }
                }
            }
            for q in 0..n.saturating_sub(1) {
                let fixed = |gate| Op { gate, kind: GateKind::Fixed, param: None };
                match layer.entangler {
                    Entangler::None => {}
                    Entangler::Cnot => ops.push(fixed(gates::cnot_local(q, q + 1))),
                    Entangler::Cz => ops.push(fixed(gates::cz_local(q, q + 1))),
                    Entangler::Cry => ops.push(param(GateKind::Cry, &|t| gates::cry_local(q, q + 1, t))),
                }
            }
        }
        Ok(ops)
    }

    /// `U(θ)|0...0>`.
    pub fn evaluate_state(&self, params: &[f64]) -> Result<StateVector> {
        let ops = self.ops(params)?;
        let mut s = StateVector::zero(self.num_qubits);
        for op in &ops {
            op.gate.apply_state(s.amplitudes_mut(), self.num_qubits);
        }
        Ok(s)
    }

    /// Full circuit unitary.
    pub fn evaluate_unitary(&self, params: &[f64]) -> Result<DenseOperator> {
        let ops = self.ops(params)?;
        let mut u = DenseOperator::identity(self.num_qubits);
        for op in &ops {
            u.left_apply_local(&op.gate);
        }
        Ok(u)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count {
            return Err(Error::ParameterCount { expected: self.parameter_count, found: params.len() });
        }
        Ok(())
    }
}
