//! Seeded random states, unitaries and density matrices.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::qcore::{DenseOperator, StateVector};
use crate::C64;

/// Generator used wherever the crate needs reproducible randomness.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Standard complex Gaussian (unit variance per component).
pub fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> StateVector {
    let amps: Vec<C64> = (0..1usize << num_qubits).map(|_| gaussian_c(rng)).collect();
    StateVector::new(amps).and_then(|s| s.normalized()).expect("Gaussian vector is nonzero")
}

/// Uniformly random real unit vector.
pub fn real_state<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> StateVector {
    let amps: Vec<C64> = (0..1usize << num_qubits).map(|_| C64::new(rng.sample(StandardNormal), 0.0)).collect();
    StateVector::new(amps).and_then(|s| s.normalized()).expect("Gaussian vector is nonzero")
}

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Gaussian
/// matrix. Orthonormalizing in order gives `R` a positive diagonal, which is
/// the phase correction that makes the QR factor Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> DenseOperator {
    let d = 1usize << num_qubits;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian_c(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    DenseOperator::from_fn(num_qubits, |r, c| cols[c][r]).into_unitary().expect("Gram-Schmidt output is unitary")
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> DenseOperator {
    let g = DenseOperator::from_fn(num_qubits, |_, _| gaussian_c(rng));
    let rho = g.matmul(&g.adjoint()).expect("same dimension");
    let tr = rho.trace();
    rho.scale(tr.inv())
}

/// Random Hermitian matrix with entries of order one.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> DenseOperator {
    let g = DenseOperator::from_fn(num_qubits, |_, _| gaussian_c(rng));
    g.add(&g.adjoint()).expect("same dimension").scale(C64::new(0.5, 0.0))
}

/// Uniform sample from `(-scale, scale)` for each of `n` parameters; zeros
/// when `scale` is zero.
pub fn uniform_params<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| (2.0 * rng.random::<f64>() - 1.0) * scale).collect()
}
