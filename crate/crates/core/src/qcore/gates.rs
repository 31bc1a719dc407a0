//! Fixed and rotation gates, both as dense matrices and as [`LocalGate`]s.
//!
//! `Ry(θ) = e^{-iθY/2}`, `Rz(θ) = e^{-iθZ/2}`. Controlled gates take the
//! control as the first (more significant) qubit.

#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use super::local::{LocalGate, Mat2, Mat4};
use super::operator::DenseOperator;
use crate::C64;

const O: C64 = C64::new(0.0, 0.0);
const L: C64 = C64::new(1.0, 0.0);

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

pub fn h_mat() -> Mat2 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    [[r(s), r(s)], [r(s), r(-s)]]
}

pub fn s_mat() -> Mat2 {
    [[L, O], [O, C64::new(0.0, 1.0)]]
}

pub fn x_mat() -> Mat2 {
    [[O, L], [L, O]]
}

pub fn ry_mat(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[r(c), r(-s)], [r(s), r(c)]]
}

pub fn rz_mat(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, -s), O], [O, C64::new(c, s)]]
}

/// `d Ry / dθ`.
pub fn ry_deriv_mat(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[r(-s / 2.0), r(-c / 2.0)], [r(c / 2.0), r(-s / 2.0)]]
}

/// `d Rz / dθ`.
pub fn rz_deriv_mat(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(-s / 2.0, -c / 2.0), O], [O, C64::new(-s / 2.0, c / 2.0)]]
}

pub fn cnot_mat() -> Mat4 {
    [[L, O, O, O], [O, L, O, O], [O, O, O, L], [O, O, L, O]]
}

pub fn cz_mat() -> Mat4 {
    [[L, O, O, O], [O, L, O, O], [O, O, L, O], [O, O, O, r(-1.0)]]
}

pub fn swap_mat() -> Mat4 {
    [[L, O, O, O], [O, O, L, O], [O, L, O, O], [O, O, O, L]]
}

pub fn cry_mat(theta: f64) -> Mat4 {
    controlled(&ry_mat(theta), false)
}

/// `d CRy / dθ` (zero on the control-off block).
pub fn cry_deriv_mat(theta: f64) -> Mat4 {
    controlled(&ry_deriv_mat(theta), true)
}

fn controlled(m: &Mat2, derivative: bool) -> Mat4 {
    let d = if derivative { O } else { L };
    [[d, O, O, O], [O, d, O, O], [O, O, m[0][0], m[0][1]], [O, O, m[1][0], m[1][1]]]
}

fn one(m: Mat2) -> DenseOperator {
    DenseOperator::from_local(&LocalGate::One { qubit: 0, m }, 1).assume_unitary()
}

fn two(m: Mat4) -> DenseOperator {
    DenseOperator::from_local(&LocalGate::Two { q0: 0, q1: 1, m }, 2).assume_unitary()
}

pub fn hadamard() -> DenseOperator {
    one(h_mat())
}

pub fn phase_s() -> DenseOperator {
    one(s_mat())
}

pub fn pauli_x() -> DenseOperator {
    one(x_mat())
}

pub fn pauli_y() -> DenseOperator {
    one([[O, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), O]])
}

pub fn pauli_z() -> DenseOperator {
    one([[L, O], [O, r(-1.0)]])
}

pub fn ry(theta: f64) -> DenseOperator {
    one(ry_mat(theta))
}

pub fn rz(theta: f64) -> DenseOperator {
    one(rz_mat(theta))
}

pub fn cnot() -> DenseOperator {
    two(cnot_mat())
}

pub fn cz() -> DenseOperator {
    two(cz_mat())
}

pub fn swap() -> DenseOperator {
    two(swap_mat())
}

pub fn cry(theta: f64) -> DenseOperator {
    two(cry_mat(theta))
}

pub fn h_local(qubit: usize) -> LocalGate {
    LocalGate::One { qubit, m: h_mat() }
}

pub fn s_local(qubit: usize) -> LocalGate {
    LocalGate::One { qubit, m: s_mat() }
}

pub fn x_local(qubit: usize) -> LocalGate {
    LocalGate::One { qubit, m: x_mat() }
}

pub fn ry_local(qubit: usize, theta: f64) -> LocalGate {
    LocalGate::One { qubit, m: ry_mat(theta) }
}

pub fn rz_local(qubit: usize, theta: f64) -> LocalGate {
    LocalGate::One { qubit, m: rz_mat(theta) }
}

pub fn cnot_local(control: usize, target: usize) -> LocalGate {
    LocalGate::Two { q0: control, q1: target, m: cnot_mat() }
}

pub fn cz_local(control: usize, target: usize) -> LocalGate {
    LocalGate::Two { q0: control, q1: target, m: cz_mat() }
}

pub fn swap_local(a: usize, b: usize) -> LocalGate {
    LocalGate::Two { q0: a, q1: b, m: swap_mat() }
}

pub fn cry_local(control: usize, target: usize, theta: f64) -> LocalGate {
    LocalGate::Two { q0: control, q1: target, m: cry_mat(theta) }
}

/// Lift a local gate to `num_qubits`.
pub fn embed(gate: &LocalGate, num_qubits: usize) -> DenseOperator {
    DenseOperator::from_local(gate, num_qubits).assume_unitary()
}

/// `H^{⊗n}`.
pub fn hadamard_all(num_qubits: usize) -> DenseOperator {
    let mut op = DenseOperator::identity(num_qubits);
    for q in 0..num_qubits {
        op.left_apply_local(&h_local(q));
    }
    op
}
