//! In-place application of one- and two-qubit gates to amplitude arrays.
//!
//! Every routine works on a strided view: element `i` of the logical vector
//! lives at `data[offset + i * stride]`. A statevector uses stride 1; a
//! column of a row-major `d × d` matrix uses `offset = col, stride = d`.

use crate::C64;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

/// A gate restricted to the qubits it touches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalGate {
    One {
        qubit: usize,
        m: Mat2,
    },
    /// `m` is indexed by `2 * bit(q0) + bit(q1)`.
    Two {
        q0: usize,
        q1: usize,
        m: Mat4,
    },
}

impl LocalGate {
    pub fn adjoint(&self) -> Self {
        match *self {
            LocalGate::One { qubit, m } => LocalGate::One { qubit, m: adjoint2(&m) },
            LocalGate::Two { q0, q1, m } => LocalGate::Two { q0, q1, m: adjoint4(&m) },
        }
    }

    pub fn transpose(&self) -> Self {
        match *self {
            LocalGate::One { qubit, m } => LocalGate::One { qubit, m: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]] },
            LocalGate::Two { q0, q1, m } => {
                let mut t = m;
                for (r, row) in m.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        t[c][r] = *v;
                    }
                }
                LocalGate::Two { q0, q1, m: t }
            }
        }
    }

    /// Apply to a strided vector of `num_qubits` qubits.
    pub fn apply_strided(&self, data: &mut [C64], offset: usize, stride: usize, num_qubits: usize) {
        match self {
            LocalGate::One { qubit, m } => apply_one(data, offset, stride, num_qubits, *qubit, m),
            LocalGate::Two { q0, q1, m } => apply_two(data, offset, stride, num_qubits, *q0, *q1, m),
        }
    }

    pub fn apply_state(&self, amps: &mut [C64], num_qubits: usize) {
        self.apply_strided(amps, 0, 1, num_qubits);
    }

    /// `M ← G M` for a row-major `M`.
    pub fn left_multiply(&self, data: &mut [C64], dim: usize, num_qubits: usize) {
        for col in 0..dim {
            self.apply_strided(data, col, dim, num_qubits);
        }
    }

    /// `M ← M G` for a row-major `M`. Each row `v` becomes `Gᵀ v`.
    pub fn right_multiply(&self, data: &mut [C64], dim: usize, num_qubits: usize) {
        let t = self.transpose();
        for row in 0..dim {
            t.apply_strided(data, row * dim, 1, num_qubits);
        }
    }

    /// `Tr(M G)` for a row-major `M`, without forming `G` on the full space.
    pub fn trace_with(&self, data: &[C64], dim: usize, num_qubits: usize) -> C64 {
        let env = self.environment(data, dim, num_qubits);
        self.contract(&env)
    }

    /// Reduced environment `E[a][b] = Σ_rest M[(rest,a),(rest,b)]`, so that
    /// `Tr(M G) = Σ_ab E[a][b] g[b][a]`.
    pub fn environment(&self, data: &[C64], dim: usize, num_qubits: usize) -> Environment {
        match *self {
            LocalGate::One { qubit, .. } => {
                let bit = 1usize << (num_qubits - 1 - qubit);
                let mut e = [[C64::new(0.0, 0.0); 2]; 2];
                for base in (0..dim).filter(|i| i & bit == 0) {
                    for (a, ra) in [base, base | bit].into_iter().enumerate() {
                        for (b, cb) in [base, base | bit].into_iter().enumerate() {
                            e[a][b] += data[ra * dim + cb];
                        }
                    }
                }
                Environment::One(e)
            }
            LocalGate::Two { q0, q1, .. } => {
                let b0 = 1usize << (num_qubits - 1 - q0);
                let b1 = 1usize << (num_qubits - 1 - q1);
                let mut e = [[C64::new(0.0, 0.0); 4]; 4];
                for base in (0..dim).filter(|i| i & (b0 | b1) == 0) {
                    let idx = [base, base | b1, base | b0, base | b0 | b1];
                    for (a, &ra) in idx.iter().enumerate() {
                        for (b, &cb) in idx.iter().enumerate() {
                            e[a][b] += data[ra * dim + cb];
                        }
                    }
                }
                Environment::Two(e)
            }
        }
    }

    /// `Σ_ab E[a][b] g[b][a]` for this gate's local matrix.
    pub fn contract(&self, env: &Environment) -> C64 {
        match (self, env) {
            (LocalGate::One { m, .. }, Environment::One(e)) => {
                let mut t = C64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        t += e[a][b] * m[b][a];
                    }
                }
                t
            }
            (LocalGate::Two { m, .. }, Environment::Two(e)) => {
                let mut t = C64::new(0.0, 0.0);
                for a in 0..4 {
                    for b in 0..4 {
                        t += e[a][b] * m[b][a];
                    }
                }
                t
            }
            _ => panic!("environment arity does not match gate"),
        }
    }
}

/// Reduced environment of a local gate; see [`LocalGate::environment`].
#[derive(Debug, Clone, Copy)]
pub enum Environment {
    One(Mat2),
    Two(Mat4),
}

fn apply_one(data: &mut [C64], offset: usize, stride: usize, nq: usize, q: usize, m: &Mat2) {
    let bit = 1usize << (nq - 1 - q);
    let dim = 1usize << nq;
    for i in 0..dim {
        if i & bit != 0 {
            continue;
        }
        let i0 = offset + i * stride;
        let i1 = offset + (i | bit) * stride;
        let (a, b) = (data[i0], data[i1]);
        data[i0] = m[0][0] * a + m[0][1] * b;
        data[i1] = m[1][0] * a + m[1][1] * b;
    }
}

fn apply_two(data: &mut [C64], offset: usize, stride: usize, nq: usize, q0: usize, q1: usize, m: &Mat4) {
    let b0 = 1usize << (nq - 1 - q0);
    let b1 = 1usize << (nq - 1 - q1);
    let dim = 1usize << nq;
    for i in 0..dim {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b1, i | b0, i | b0 | b1].map(|k| offset + k * stride);
        let v = idx.map(|k| data[k]);
        for (r, &k) in idx.iter().enumerate() {
            data[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

fn adjoint2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn adjoint4(m: &Mat4) -> Mat4 {
    let mut t = *m;
    for (r, row) in m.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            t[c][r] = v.conj();
        }
    }
    t
}
