//! Dense solves, the matrix exponential and basis completion.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use super::operator::DenseOperator;
use super::state::StateVector;
use crate::{Error, Result, C64};

/// Largest dimension accepted by [`expm`].
pub const MAX_EXPM_DIM: usize = 4096;

/// Solve `A X = B` in place by LU with partial pivoting. `a` is `n × n` and
/// `b` is `n × k`, both row-major; `b` is overwritten by `X`.
pub fn lu_solve(mut a: Vec<C64>, n: usize, b: &mut [C64]) -> Result<()> {
    if a.len() != n * n || !b.len().is_multiple_of(n) {
        return Err(Error::DimensionMismatch { expected: n * n, found: a.len() });
    }
    let k = b.len() / n;
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm())).unwrap_or(col);
        if a[pivot * n + col].norm() <= scale * 1e-300 || a[pivot * n + col].norm() == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            for c in 0..k {
                b.swap(pivot * k + c, col * k + c);
            }
        }
        let inv = a[col * n + col].inv();
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[row * n + c] -= f * v;
            }
            for c in 0..k {
                let v = b[col * k + c];
                b[row * k + c] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = a[col * n + col].inv();
        for c in 0..k {
            let mut v = b[col * k + c];
            for j in col + 1..n {
                v -= a[col * n + j] * b[j * k + c];
            }
            b[col * k + c] = v * inv;
        }
    }
    Ok(())
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &DenseOperator) -> Result<DenseOperator> {
    if a.dim() > MAX_EXPM_DIM {
        return Err(Error::Unsupported(alloc::format!("matrix exponential of dimension {} exceeds {}", a.dim(), MAX_EXPM_DIM)));
    }
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(C64::new(0.5f64.powi(s), 0.0));
    let nq = a.num_qubits();
    let id = DenseOperator::identity(nq);
    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a4.matmul(&a2)?;
    let b = |i: usize| C64::new(PADE13[i], 0.0);

    let mut inner_u = a6.scale(b(13));
    inner_u.add_scaled(b(11), &a4)?;
    inner_u.add_scaled(b(9), &a2)?;
    let mut u = a6.matmul(&inner_u)?;
    u.add_scaled(b(7), &a6)?;
    u.add_scaled(b(5), &a4)?;
    u.add_scaled(b(3), &a2)?;
    u.add_scaled(b(1), &id)?;
    let u = a.matmul(&u)?;

    let mut inner_v = a6.scale(b(12));
    inner_v.add_scaled(b(10), &a4)?;
    inner_v.add_scaled(b(8), &a2)?;
    let mut v = a6.matmul(&inner_v)?;
    v.add_scaled(b(6), &a6)?;
    v.add_scaled(b(4), &a4)?;
    v.add_scaled(b(2), &a2)?;
    v.add_scaled(b(0), &id)?;

    let p = v.add(&u)?;
    let q = v.sub(&u)?;
    let n = a.dim();
    let mut x = p.data().to_vec();
    lu_solve(q.data().to_vec(), n, &mut x)?;
    let mut r = DenseOperator::new(x)?;
    for _ in 0..s {
        r = r.matmul(&r)?;
    }
    Ok(r)
}

/// A unitary whose first column is the unit vector `v`, built from a
/// Householder reflection.
pub fn complete_to_unitary(v: &StateVector) -> Result<DenseOperator> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let x = v.amplitudes();
    let d = x.len();
    let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
    let mut u: Vec<C64> = x.iter().map(|a| -a).collect();
    u[0] += phase;
    let uu: f64 = u.iter().map(|a| a.norm_sqr()).sum();
    let nq = v.num_qubits();
    if uu < 1e-28 {
        return Ok(DenseOperator::identity(nq).scale(phase));
    }
    let f = 2.0 / uu;
    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            let delta = if r == c { 1.0 } else { 0.0 };
            data[r * d + c] = phase * (C64::new(delta, 0.0) - u[r] * u[c].conj() * f);
        }
    }
    DenseOperator::new(data)?.into_unitary()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{gates, Pauli, PauliTerm};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solve_small_system() {
        let a = vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)];
        let x = [c(1.0, 2.0), c(-0.5, 0.25)];
        let mut b = vec![a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]];
        lu_solve(a, 2, &mut b).unwrap();
        assert!((b[0] - x[0]).norm() < 1e-14 && (b[1] - x[1]).norm() < 1e-14);
    }

    #[test]
    fn singular_system_is_reported() {
        let a = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        let mut b = vec![c(1.0, 0.0), c(1.0, 0.0)];
        assert_eq!(lu_solve(a, 2, &mut b), Err(Error::Singular));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&DenseOperator::zeros(2)).unwrap();
        assert!(e.max_abs_diff(&DenseOperator::identity(2)) < 1e-15);
    }

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-iθX/2) has closed form cos(θ/2) I - i sin(θ/2) X.
        for theta in [1e-3, 0.7, 3.0, 40.0] {
            let gen = PauliTerm::single(1, 0, Pauli::X, c(0.0, -theta / 2.0)).to_matrix();
            let e = expm(&gen).unwrap();
            let expected = DenseOperator::identity(1)
                .scale(c((theta / 2.0).cos(), 0.0))
                .add(&gates::pauli_x().scale(c(0.0, -(theta / 2.0).sin())))
                .unwrap();
            assert!(e.max_abs_diff(&expected) < 1e-12, "theta {theta}");
        }
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let mut d = DenseOperator::zeros(1);
        d.set(0, 0, c(-3.0, 1.0));
        d.set(1, 1, c(8.0, 0.0));
        d.set(0, 1, c(0.0, 0.0));
        let e = expm(&d).unwrap();
        let e00 = c((-3.0f64).exp() * 1.0f64.cos(), (-3.0f64).exp() * 1.0f64.sin());
        assert!((e.get(0, 0) - e00).norm() < 1e-12 * e00.norm());
        assert!((e.get(1, 1).re - 8.0f64.exp()).abs() < 1e-9 * 8.0f64.exp());

        let mut n = DenseOperator::zeros(1);
        n.set(0, 1, c(5.0, 0.0));
        let e = expm(&n).unwrap();
        assert!((e.get(0, 1) - c(5.0, 0.0)).norm() < 1e-13);
        assert!((e.get(0, 0) - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn completion_has_requested_first_column() {
        let v = StateVector::new(vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.48), c(-0.64, 0.0)]).unwrap();
        let u = complete_to_unitary(&v).unwrap();
        assert!(u.column(0).distance(&v).unwrap() < 1e-14);
        let w = StateVector::new(vec![c(0.0, 0.6), c(0.8, 0.0)]).unwrap();
        let u = complete_to_unitary(&w).unwrap();
        assert!(u.column(0).distance(&w).unwrap() < 1e-14);
        let e = StateVector::basis(2, 0).scale(c(0.0, 1.0));
        assert!(complete_to_unitary(&e).unwrap().column(0).distance(&e).unwrap() < 1e-15);
    }
}
