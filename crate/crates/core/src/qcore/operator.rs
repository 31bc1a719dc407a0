use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use super::local::LocalGate;
use super::state::{qubits_for_dim, StateVector};
use crate::{Error, Result, C64};

const UNITARY_TOL: f64 = 1e-9;

/// Dense `2^q × 2^q` complex matrix, row-major.
///
/// The `unitary` flag is only ever set after a check (or by construction
/// from unitary pieces) and implies `‖U†U − I‖_max < 1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    num_qubits: usize,
    data: Vec<C64>,
    unitary: bool,
}

impl DenseOperator {
    /// Build from row-major entries.
    pub fn new(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::NotSquare { len: data.len() });
        }
        let num_qubits = qubits_for_dim(dim)?;
        Ok(Self { dim, num_qubits, data, unitary: false })
    }

    pub fn from_fn(num_qubits: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let dim = 1usize << num_qubits;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, num_qubits, data, unitary: false }
    }

    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self { dim, num_qubits, data: vec![C64::new(0.0, 0.0); dim * dim], unitary: false }
    }

    pub fn identity(num_qubits: usize) -> Self {
        let mut op = Self::zeros(num_qubits);
        for i in 0..op.dim {
            op.data[i * op.dim + i] = C64::new(1.0, 0.0);
        }
        op.unitary = true;
        op
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        let (x, y) = (a.amplitudes(), b.amplitudes());
        Ok(Self::from_fn(a.num_qubits(), |r, c| x[r] * y[c].conj()))
    }

    /// Lift a local gate to the full `num_qubits` space.
    pub fn from_local(gate: &LocalGate, num_qubits: usize) -> Self {
        let mut op = Self::identity(num_qubits);
        gate.left_multiply(&mut op.data, op.dim, num_qubits);
        op.unitary = false;
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
        self.unitary = false;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        self.unitary = false;
        &mut self.data
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul_unchecked(self);
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((p.get(r, c) - target).norm());
            }
        }
        worst
    }

    /// Verify unitarity and set the flag.
    pub fn into_unitary(mut self) -> Result<Self> {
        if !self.unitary {
            let defect = self.unitarity_defect();
            if !(defect < UNITARY_TOL) {
                return Err(Error::NotUnitary(defect));
            }
            self.unitary = true;
        }
        Ok(self)
    }

    /// Set the unitary flag without checking. Callers must know it holds.
    pub(crate) fn assume_unitary(mut self) -> Self {
        self.unitary = true;
        self
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.matmul_unchecked(other))
    }

    fn matmul_unchecked(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            let row = &mut out[r * d..(r + 1) * d];
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * d..(k + 1) * d];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { dim: d, num_qubits: self.num_qubits, data: out, unitary: self.unitary && other.unitary }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.transpose();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let data = (0..d * d).map(|i| self.data[(i % d) * d + i / d]).collect();
        Self { dim: d, num_qubits: self.num_qubits, data, unitary: self.unitary }
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, num_qubits: self.num_qubits, data: self.data.iter().map(|v| v.conj()).collect(), unitary: self.unitary }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: C64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        self.unitary = false;
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            num_qubits: self.num_qubits,
            data: self.data.iter().map(|v| v * c).collect(),
            unitary: self.unitary && (c.norm() - 1.0).abs() < 1e-12,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.data[ra * da + ca];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for rb in 0..db {
                    let dst = (ra * db + rb) * d + ca * db;
                    for cb in 0..db {
                        data[dst + cb] = a * other.data[rb * db + cb];
                    }
                }
            }
        }
        Self { dim: d, num_qubits: self.num_qubits + other.num_qubits, data, unitary: self.unitary && other.unitary }
    }

    /// Matrix-vector product; no renormalization.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: s.dim() });
        }
        let x = s.amplitudes();
        let out = self.data.chunks_exact(self.dim).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
        StateVector::new(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Column `j` as a state.
    pub fn column(&self, j: usize) -> StateVector {
        let col = (0..self.dim).map(|r| self.data[r * self.dim + j]).collect();
        StateVector::new(col).expect("operator dimension is a power of two")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum column sum).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim).map(|c| (0..self.dim).map(|r| self.data[r * self.dim + c].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `M ← G M` for a local gate.
    pub fn left_apply_local(&mut self, gate: &LocalGate) {
        let unitary = self.unitary;
        gate.left_multiply(&mut self.data, self.dim, self.num_qubits);
        self.unitary = unitary;
    }

    /// `M ← M G` for a local gate.
    pub fn right_apply_local(&mut self, gate: &LocalGate) {
        let unitary = self.unitary;
        gate.right_multiply(&mut self.data, self.dim, self.num_qubits);
        self.unitary = unitary;
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            num_qubits: self.num_qubits,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
            unitary: false,
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}
