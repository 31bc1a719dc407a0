//! Concrete models: the driven, damped two-level system, the two-site
//! dissipative transverse-field Ising model, and Kraus channels.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;

use crate::evolve::StepOperator;
use crate::qcore::{DenseOperator, PauliTerm};
use crate::random::gaussian_c;
use crate::vectorize::{LcuTerm, LindbladModel};
use crate::{Error, Result, C64};
use rand::Rng;

fn term(s: &str, re: f64, im: f64) -> PauliTerm {
    PauliTerm::parse(s, C64::new(re, im)).expect("static Pauli label")
}

/// `H = −(δ/2)Z − (Ω/2)X` with the single jump `L = (√γ/2)(X − iY)`, which
/// is `√γ |1><0|`. With `γ = 0` the jump is omitted.
pub fn amplitude_damping_model(delta: f64, omega: f64, gamma: f64) -> Result<LindbladModel> {
    check_rate(gamma)?;
    let h = vec![term("Z", -delta / 2.0, 0.0), term("X", -omega / 2.0, 0.0)];
    let s = gamma.sqrt() / 2.0;
    let jumps = if gamma > 0.0 { vec![vec![term("X", s, 0.0), term("Y", 0.0, -s)]] } else { Vec::new() };
    LindbladModel::new(1, h, jumps)
}

/// The eight-term step `Q(Δt)` of the two-level system, with the coherent
/// drive on each register combined into a single Hadamard-direction term.
///
/// With `α = √2δΔt/2` and `β = 1 − γΔt/2` the terms are
///
/// | j | `Q_j`                              | `a_j`        |
/// |---|------------------------------------|--------------|
/// | 0 | `I ⊗ iHad`                         | `α`          |
/// | 1 | `−I ⊗ Z`                           | `γΔt/4`      |
/// | 2 | `(βI − iα Had⊗I)/√(α²+β²)`         | `√(α²+β²)`   |
/// | 3 | `−Z ⊗ I`                           | `γΔt/4`      |
/// | 4 | `X ⊗ X`                            | `γΔt/4`      |
/// | 5 | `X ⊗ (−iY)`                        | `γΔt/4`      |
/// | 6 | `−iY ⊗ X`                          | `γΔt/4`      |
/// | 7 | `−Y ⊗ Y`                           | `γΔt/4`      |
///
/// where `Had = (X + Z)/√2`. The combination needs `δ = Ω`; other values
/// are rejected.
pub fn amplitude_damping_step(delta: f64, omega: f64, gamma: f64, dt: f64) -> Result<StepOperator> {
    check_rate(gamma)?;
    if (delta - omega).abs() > 1e-12 * delta.abs().max(omega.abs()).max(1.0) {
        return Err(Error::InvalidModel(format!(
            "the eight-term step needs δ = Ω (got δ = {delta}, Ω = {omega}); use the generic generator instead"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let alpha = 2f64.sqrt() * delta * dt / 2.0;
    let beta = 1.0 - gamma * dt / 2.0;
    if beta < 0.0 {
        return Err(Error::InvalidArgument(format!("γΔt = {} exceeds 2", gamma * dt)));
    }
    let r = alpha.hypot(beta);
    let g = gamma * dt / 4.0;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    // Sign of α tracks δ; keep the weight nonnegative by folding it into Q0, Q2.
    let (a0, s) = (alpha.abs(), alpha.signum());
    let terms = vec![
        LcuTerm::pauli_sum(a0, vec![term("IZ", 0.0, s * h), term("IX", 0.0, s * h)])?,
        LcuTerm::pauli(g, term("IZ", -1.0, 0.0))?,
        LcuTerm::pauli_sum(r, vec![term("II", beta / r, 0.0), term("ZI", 0.0, -alpha * h / r), term("XI", 0.0, -alpha * h / r)])?,
        LcuTerm::pauli(g, term("ZI", -1.0, 0.0))?,
        LcuTerm::pauli(g, term("XX", 1.0, 0.0))?,
        LcuTerm::pauli(g, term("XY", 0.0, -1.0))?,
        LcuTerm::pauli(g, term("YX", 0.0, -1.0))?,
        LcuTerm::pauli(g, term("YY", -1.0, 0.0))?,
    ];
    StepOperator::from_terms(2, terms, dt)
}

/// `H = −V Z₁Z₂ − Ω(X₁ + X₂)` with jumps `L_k = √γ(X_k − iY_k)` on each
/// site. With `γ = 0` the jumps are omitted.
pub fn dtfim_model(v: f64, omega: f64, gamma: f64) -> Result<LindbladModel> {
    check_rate(gamma)?;
    let h = vec![term("ZZ", -v, 0.0), term("XI", -omega, 0.0), term("IX", -omega, 0.0)];
    let s = gamma.sqrt();
    let jumps = if gamma > 0.0 {
        vec![vec![term("XI", s, 0.0), term("YI", 0.0, -s)], vec![term("IX", s, 0.0), term("IY", 0.0, -s)]]
    } else {
        Vec::new()
    };
    LindbladModel::new(2, h, jumps)
}

/// A random model on `n` qubits: three random Pauli strings with real
/// coefficients in `(−2, 2)` for `H`, and one or two jump operators, each a
/// combination of two random Pauli strings with complex Gaussian
/// coefficients.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<LindbladModel> {
    let string = |rng: &mut R, coeff: C64| {
        let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        PauliTerm::parse(&label, coeff).expect("generated label")
    };
    let mut h = Vec::new();
    for _ in 0..3 {
        let c = C64::new(rng.random_range(-2.0..2.0), 0.0);
        h.push(string(rng, c));
    }
    let mut jumps = Vec::new();
    for _ in 0..rng.random_range(1..3usize) {
        let mut l = Vec::new();
        for _ in 0..2 {
            let c = gaussian_c(rng);
            l.push(string(rng, c));
        }
        jumps.push(l);
    }
    LindbladModel::new(n, h, jumps)
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidModel(format!("decay rate must be nonnegative, got {gamma}")));
    }
    Ok(())
}

/// `ρ ↦ Σ_l E_l ρ E_l†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus_ops: Vec<DenseOperator>,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<DenseOperator>) -> Result<Self> {
        let first = kraus_ops.first().ok_or_else(|| Error::InvalidArgument("channel needs a Kraus operator".into()))?;
        let d = first.dim();
        if let Some(op) = kraus_ops.iter().find(|op| op.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
        }
        if kraus_ops.len() > d * d {
            return Err(Error::InvalidArgument(format!("{} Kraus operators exceed N² = {}", kraus_ops.len(), d * d)));
        }
        Ok(Self { kraus_ops })
    }

    /// `{|0><0| √(1−p) + |1><1|, √p |1><0|}`: decay of `|0>` into `|1>`
    /// with probability `p`, the exact solution of the damping-only
    /// two-level model for `p = 1 − e^{−γt}`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("decay probability {p} outside [0, 1]")));
        }
        let mut e0 = DenseOperator::zeros(1);
        e0.set(0, 0, C64::new((1.0 - p).sqrt(), 0.0));
        e0.set(1, 1, C64::new(1.0, 0.0));
        let mut e1 = DenseOperator::zeros(1);
        e1.set(1, 0, C64::new(p.sqrt(), 0.0));
        Self::new(vec![e0, e1])
    }

    /// `{√(1−p) I, √p X}`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("flip probability {p} outside [0, 1]")));
        }
        Self::new(vec![term("I", (1.0 - p).sqrt(), 0.0).to_matrix(), term("X", p.sqrt(), 0.0).to_matrix()])
    }

    pub fn kraus_ops(&self) -> &[DenseOperator] {
        &self.kraus_ops
    }

    pub fn num_qubits(&self) -> usize {
        self.kraus_ops[0].num_qubits()
    }

    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        let mut out = DenseOperator::zeros(rho.num_qubits());
        for e in &self.kraus_ops {
            out = out.add(&e.matmul(rho)?.matmul(&e.adjoint())?)?;
        }
        Ok(out)
    }

    /// `max |(Σ E†E − I)_ij|`.
    pub fn normalization_defect(&self) -> f64 {
        let mut s = DenseOperator::zeros(self.num_qubits());
        for e in &self.kraus_ops {
            s = s.add(&e.adjoint().matmul(e).expect("same dimension")).expect("same dimension");
        }
        s.max_abs_diff(&DenseOperator::identity(self.num_qubits()))
    }
}

/// `E₀ = I − iHΔt − (Δt/2)Σ L†L`, `E_k = √Δt L_k`.
pub fn lindblad_to_kraus_first_order(model: &LindbladModel, dt: f64) -> Result<KrausChannel> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let n = model.num_system_qubits();
    let mut e0 = DenseOperator::identity(n);
    e0.add_scaled(C64::new(0.0, -dt), &model.hamiltonian_matrix())?;
    let jumps = model.jump_matrices();
    for l in &jumps {
        e0.add_scaled(C64::new(-dt / 2.0, 0.0), &l.adjoint().matmul(l)?)?;
    }
    let mut ops = vec![e0];
    ops.extend(jumps.iter().map(|l| l.scale(C64::new(dt.sqrt(), 0.0))));
    KrausChannel::new(ops)
}

/// `Σ_l E_l* ⊗ E_l`, acting on vectorized states.
pub fn kraus_to_superoperator(ch: &KrausChannel) -> DenseOperator {
    let n = ch.num_qubits();
    let mut out = DenseOperator::zeros(2 * n);
    for e in &ch.kraus_ops {
        out.add_scaled(C64::new(1.0, 0.0), &e.conj().tensor(e)).expect("same dimension");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{build_step, reference_propagator};
    use crate::random::{density_matrix, seeded};
    use crate::vectorize::{build_generator, vectorize_density};

    fn first_order(model: &LindbladModel, dt: f64) -> DenseOperator {
        let mut q = DenseOperator::identity(2 * model.num_system_qubits());
        q.add_scaled(C64::new(dt, 0.0), &model.superoperator()).unwrap();
        q
    }

    #[test]
    fn eight_term_step_weights() {
        let step = amplitude_damping_step(1.0, 1.0, 1.0, 0.01).unwrap();
        let w = step.lcu().weights();
        assert_eq!(w.len(), 8);
        assert_eq!(step.num_ancillas(), 3);
        assert!((w[0] - 7.0711e-3).abs() < 1e-7);
        assert!((w[2] - 0.995025).abs() < 1e-6);
        for j in [1, 3, 4, 5, 6, 7] {
            assert!((w[j] - 2.5e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn eight_term_step_is_first_order_propagator() {
        for (d, g, dt) in [(1.0, 1.0, 0.01), (0.7, 0.0, 0.05), (-1.3, 2.0, 0.02), (0.0, 0.5, 0.1)] {
            let model = amplitude_damping_model(d, d, g).unwrap();
            let step = amplitude_damping_step(d, d, g, dt).unwrap();
            assert!(step.lcu().dense().max_abs_diff(&first_order(&model, dt)) < 1e-13, "δ = {d}, γ = {g}");
        }
    }

    #[test]
    fn eight_term_step_needs_equal_drive_and_detuning() {
        assert!(matches!(amplitude_damping_step(1.0, 0.5, 1.0, 0.01), Err(Error::InvalidModel(_))));
        assert!(amplitude_damping_step(1.0, 1.0, -1.0, 0.01).is_err());
        assert!(amplitude_damping_step(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn generic_step_matches_eight_term_step() {
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let generic = build_step(&build_generator(&model).unwrap(), 0.01, 1).unwrap();
        assert_eq!(generic.lcu().len(), 16);
        let special = amplitude_damping_step(1.0, 1.0, 1.0, 0.01).unwrap();
        assert!(generic.lcu().dense().max_abs_diff(&special.lcu().dense()) < 1e-13);
    }

    #[test]
    fn dtfim_generator_weights_and_order() {
        let model = dtfim_model(1.0, 1.0, 0.1).unwrap();
        let gen = build_generator(&model).unwrap();
        let w = gen.weights();
        assert_eq!(w.len(), 19);
        let mut want = vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        want.extend([0.1; 12]);
        want.push(0.4);
        for (a, b) in w.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14, "{w:?}");
        }
        assert_eq!(gen.terms()[6].paulis[0].label(), "XIXI");
        assert!(gen.terms()[18].unitary.max_abs_diff(&DenseOperator::identity(4).scale(C64::new(-1.0, 0.0))) < 1e-15);

        let step = build_step(&gen, 0.01, 1).unwrap();
        assert_eq!(step.lcu().len(), 32);
        assert_eq!(step.num_ancillas(), 5);
        assert!(step.lcu().weights()[19..].iter().all(|&a| (a - 1.0 / 13.0).abs() < 1e-15));
    }

    #[test]
    fn dtfim_without_decay_has_six_terms() {
        let gen = build_generator(&dtfim_model(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(gen.len(), 6);
    }

    #[test]
    fn first_order_kraus_defect_is_second_order() {
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let defect = |dt| lindblad_to_kraus_first_order(&model, dt).unwrap().normalization_defect();
        let slope = (defect(0.02) / defect(0.01)).log2();
        assert!((slope - 2.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn first_order_kraus_matches_step_to_second_order() {
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let gap = |dt| {
            let k = kraus_to_superoperator(&lindblad_to_kraus_first_order(&model, dt).unwrap());
            k.max_abs_diff(&first_order(&model, dt))
        };
        assert!((gap(0.02) / gap(0.01)).log2() > 1.9);
    }

    #[test]
    fn exact_damping_channel_matches_propagator() {
        let (g, t) = (0.8, 0.3);
        let model = amplitude_damping_model(0.0, 0.0, g).unwrap();
        let ch = KrausChannel::amplitude_damping(1.0 - (-g * t).exp()).unwrap();
        assert!(ch.normalization_defect() < 1e-15);
        let prop = reference_propagator(&model, t).unwrap();
        assert!(kraus_to_superoperator(&ch).max_abs_diff(&prop) < 1e-12);
    }

    #[test]
    fn exact_channels_preserve_trace() {
        let mut rng = seeded(9);
        for ch in [KrausChannel::bit_flip(0.3).unwrap(), KrausChannel::amplitude_damping(0.6).unwrap()] {
            let rho = density_matrix(&mut rng, 1);
            let out = ch.apply(&rho).unwrap();
            assert!((out.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(out.is_hermitian(1e-12));
            let v = kraus_to_superoperator(&ch).apply(&vectorize_density(&rho)).unwrap();
            assert!(vectorize_density(&out).distance(&v).unwrap() < 1e-12);
        }
    }

    #[test]
    fn channel_validation() {
        assert!(KrausChannel::new(Vec::new()).is_err());
        assert!(KrausChannel::bit_flip(1.5).is_err());
        let ops = vec![DenseOperator::identity(1), DenseOperator::identity(2)];
        assert!(matches!(KrausChannel::new(ops), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn random_models_are_valid() {
        let mut rng = seeded(4);
        for n in 1..3 {
            let m = random_model(&mut rng, n).unwrap();
            assert_eq!(m.num_system_qubits(), n);
            assert!(m.hamiltonian_matrix().is_hermitian(1e-12));
        }
    }
}
