use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use crate::{Error, Result, C64};

/// Number of qubits for a Hilbert-space dimension.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Complex amplitudes over `2^q` basis states.
///
/// Used both for pure states and for vectorized (possibly unnormalized)
/// density operators.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    num_qubits: usize,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amps.len())?;
        Ok(Self { amps, num_qubits })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index>`.
    ///
    /// Panics if `index >= 2^num_qubits` or `num_qubits == 0`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1, "a state needs at least one qubit");
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range for {num_qubits} qubits");
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps, num_qubits }
    }

    /// `|+>^{⊗q}`.
    pub fn plus(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = 1.0 / (dim as f64).sqrt();
        Self { amps: vec![C64::new(a, 0.0); dim], num_qubits }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// True when `‖·‖₂ = 1` within 1e-10.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < 1e-10
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * c).collect(), num_qubits: self.num_qubits }
    }

    /// Conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_dim(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Euclidean distance `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { amps, num_qubits: self.num_qubits })
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Self { amps, num_qubits: self.num_qubits + other.num_qubits }
    }

    /// Born probabilities `|a_i|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(StateVector::from_real(&[1.0, 0.0, 0.0]), Err(Error::NotPowerOfTwo(3)));
        assert_eq!(StateVector::from_real(&[1.0]), Err(Error::NotPowerOfTwo(1)));
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::basis(1, 0);
        let one = StateVector::basis(1, 1);
        let plus = StateVector::plus(1);
        assert_eq!(zero.inner(&zero).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(zero.inner(&one).unwrap(), C64::new(0.0, 0.0));
        assert!((plus.inner(&zero).unwrap() - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!(zero.inner(&StateVector::zero(2)).is_err());
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = StateVector::new(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        let b = StateVector::basis(1, 0);
        assert_eq!(a.inner(&b).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn tensor_orders_leading_factor_first() {
        let s = StateVector::basis(1, 1).tensor(&StateVector::basis(1, 0));
        assert_eq!(s.amplitudes()[2], C64::new(1.0, 0.0));
    }
}
