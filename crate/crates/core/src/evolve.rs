//! Time stepping: the first-order LCU step, its post-selected circuit
//! realizations, and the matrix-exponential reference.
//!
//! All three circuit algorithms place the `m` ancilla qubits ahead of the
//! `2n` qubits of the vectorized state.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;
use rand::Rng;

use crate::compile::build_select;
use crate::measure::{expectation_complex, Observable};
use crate::qcore::gates::h_local;
use crate::qcore::linalg::{complete_to_unitary, expm};
use crate::qcore::{DenseOperator, StateVector};
use crate::random::haar_state;
use crate::vectorize::{LcuOperator, LcuTerm, LindbladModel};
use crate::{Error, Result, C64};

/// Squared norms below this mean the step annihilated the state.
pub const MIN_PROBABILITY: f64 = 1e-28;

/// `Q(Δt) = Σ_j a_j Q_j` padded to `2^m` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOperator {
    lcu: LcuOperator,
    dt: f64,
    order: usize,
    num_ancillas: usize,
}

/// First-order step `I + ΔtĤ` from a generator `Ĥ = Σ b_j Ĥ_j`: the terms
/// `(b_jΔt, Ĥ_j)` followed by the identity split into equal parts so that
/// the term count is the smallest power of two (at least 2) above the
/// generator's.
pub fn build_step(gen: &LcuOperator, dt: f64, order: usize) -> Result<StepOperator> {
    if order != 1 {
        return Err(Error::Unsupported(format!("Taylor order {order}; only first order is implemented")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let j = gen.len();
    let total = (j + 1).max(2).next_power_of_two();
    let pad = total - j;
    let mut terms: Vec<LcuTerm> =
        gen.terms().iter().map(|t| LcuTerm { weight: t.weight * dt, unitary: t.unitary.clone(), paulis: t.paulis.clone() }).collect();
    for _ in 0..pad {
        terms.push(LcuTerm::identity(1.0 / pad as f64, gen.num_qubits()));
    }
    StepOperator::from_terms(gen.num_qubits(), terms, dt)
}

impl StepOperator {
    /// Wrap an explicit term list; the count must be a power of two.
    pub fn from_terms(num_qubits: usize, terms: Vec<LcuTerm>, dt: f64) -> Result<Self> {
        let lcu = LcuOperator::new(num_qubits, terms)?;
        let num_ancillas =
            lcu.num_ancillas().ok_or_else(|| Error::InvalidArgument(format!("{} step terms is not a power of two", lcu.len())))?;
        Ok(Self { lcu, dt, order: 1, num_ancillas })
    }

    pub fn lcu(&self) -> &LcuOperator {
        &self.lcu
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `m`, with `2^m` terms.
    pub fn num_ancillas(&self) -> usize {
        self.num_ancillas
    }

    /// Qubits of the vectorized state.
    pub fn state_qubits(&self) -> usize {
        self.lcu.num_qubits()
    }

    /// `|a> = Σ_j √(a_j/A) |j>`.
    pub fn ancilla_state(&self) -> StateVector {
        let a = self.lcu.a();
        StateVector::from_real(&self.lcu.weights().iter().map(|w| (w / a).sqrt()).collect::<Vec<_>>()).expect("power of two")
    }

    /// `|a'> = Σ_j (a_j/√A') |j>`.
    pub fn ancilla_state_prime(&self) -> StateVector {
        let ap = self.lcu.a_prime().sqrt();
        StateVector::from_real(&self.lcu.weights().iter().map(|w| w / ap).collect::<Vec<_>>()).expect("power of two")
    }
}

/// Apply `Q(Δt)` directly and renormalize. Returns the new state and
/// `P = ‖Q|ρ>‖² / A²`.
pub fn step_exact_lcu(state: &StateVector, step: &StepOperator) -> Result<(StateVector, f64)> {
    let q = step.lcu.apply(state)?;
    let nsq = q.norm_sqr();
    let a = step.lcu.a();
    let p = nsq / (a * a);
    if !(nsq > MIN_PROBABILITY) {
        return Err(Error::DegenerateProjection(p));
    }
    Ok((q.scale(C64::new(1.0 / nsq.sqrt(), 0.0)), p))
}

/// Ancilla preparation `U` (on `m` qubits) and select operator `V` (on
/// `m + 2n` qubits) used by the circuit algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub u: DenseOperator,
    pub v: DenseOperator,
}

impl Components {
    pub fn new(u: DenseOperator, v: DenseOperator) -> Result<Self> {
        if v.num_qubits() <= u.num_qubits() {
            return Err(Error::DimensionMismatch { expected: u.dim() * 2, found: v.dim() });
        }
        Ok(Self { u, v })
    }

    /// Exact `U` with `U|0> = |a>` and `V = Λ_Q`.
    pub fn exact_algorithm3(step: &StepOperator) -> Result<Self> {
        Self::from_ancilla_state(&step.ancilla_state(), build_select(step.lcu())?.dense().clone())
    }

    /// Exact `U'` with `U'|0> = |a'>` and `V = Λ_Q`.
    pub fn exact_algorithm4(step: &StepOperator) -> Result<Self> {
        Self::from_ancilla_state(&step.ancilla_state_prime(), build_select(step.lcu())?.dense().clone())
    }

    /// Complete an ancilla state to a preparation unitary.
    pub fn from_ancilla_state(u_state: &StateVector, v: DenseOperator) -> Result<Self> {
        Self::new(complete_to_unitary(u_state)?, v)
    }

    pub fn num_ancillas(&self) -> usize {
        self.u.num_qubits()
    }
}

/// `√F |a> + √(1−F) |e>` for a random unit `|e>` orthogonal to `|a>`: an
/// imperfect ancilla preparation with fidelity exactly `F`.
pub fn degraded_ancilla<R: Rng + ?Sized>(a: &StateVector, fidelity: f64, rng: &mut R) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidArgument(format!("fidelity {fidelity} outside [0, 1]")));
    }
    let a = a.normalized()?;
    let e = loop {
        let r = haar_state(rng, a.num_qubits());
        let ov = a.inner(&r)?;
        let perp = r.add(&a.scale(-ov))?;
        if perp.norm() > 1e-6 {
            break perp.normalized()?;
        }
    };
    a.scale(C64::new(fidelity.sqrt(), 0.0)).add(&e.scale(C64::new((1.0 - fidelity).sqrt(), 0.0)))
}

/// Which unitary follows `V` on the ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// `U†` (Algorithm 3).
    InversePreparation,
    /// `H^{⊗m}` (Algorithm 4).
    Hadamards,
}

/// `W|0^m>|ρ>` before the ancilla measurement.
pub fn pre_measurement_state(state: &StateVector, comps: &Components, readout: Readout) -> Result<StateVector> {
    let m = comps.num_ancillas();
    if comps.v.num_qubits() != m + state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: comps.v.dim(), found: state.dim() << m });
    }
    let u0 = comps.u.column(0);
    let mut y = comps.v.apply(&u0.tensor(state))?;
    let s = state.dim();
    match readout {
        Readout::InversePreparation => {
            let ud = comps.u.adjoint();
            let mut col = StateVector::zero(m);
            for k in 0..s {
                for j in 0..1usize << m {
                    col.amplitudes_mut()[j] = y.amplitudes()[j * s + k];
                }
                let out = ud.apply(&col)?;
                for j in 0..1usize << m {
                    y.amplitudes_mut()[j * s + k] = out.amplitudes()[j];
                }
            }
        }
        Readout::Hadamards => {
            let total = y.num_qubits();
            for q in 0..m {
                h_local(q).apply_state(y.amplitudes_mut(), total);
            }
        }
    }
    Ok(y)
}

/// Project the ancillas onto `|0^m>`, returning the renormalized system state
/// and the projection probability.
pub fn post_select(psi: &StateVector, state_qubits: usize) -> Result<(StateVector, f64)> {
    let s = 1usize << state_qubits;
    let block = StateVector::new(psi.amplitudes()[..s].to_vec())?;
    let p = block.norm_sqr();
    if !(p > MIN_PROBABILITY) {
        return Err(Error::DegenerateProjection(p));
    }
    Ok((block.scale(C64::new(1.0 / p.sqrt(), 0.0)), p))
}

/// Algorithm 3: `W = (U†⊗I) V (U⊗I)`, then post-select `|0^m>`.
pub fn step_algorithm3(state: &StateVector, comps: &Components) -> Result<(StateVector, f64)> {
    post_select(&pre_measurement_state(state, comps, Readout::InversePreparation)?, state.num_qubits())
}

/// Algorithm 4: `W' = (H^{⊗m}⊗I) V (U'⊗I)`, then post-select `|0^m>`.
pub fn step_algorithm4(state: &StateVector, comps: &Components) -> Result<(StateVector, f64)> {
    post_select(&pre_measurement_state(state, comps, Readout::Hadamards)?, state.num_qubits())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Apply `Q(Δt)` as a matrix.
    ExactLcu,
    Algorithm3(Components),
    Algorithm4(Components),
    /// `e^{ĤΔt}` from the dense superoperator.
    Reference,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ExactLcu => "lcu",
            Method::Algorithm3(_) => "alg3",
            Method::Algorithm4(_) => "alg4",
            Method::Reference => "exact",
        }
    }
}

/// Per-step record of a trajectory. Index 0 is the initial state, with
/// step probability 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// Normalized vectorized states.
    pub states: Vec<StateVector>,
    pub step_probs: Vec<f64>,
    /// Running product of `step_probs`.
    pub cumulative_prob: Vec<f64>,
    /// Real parts of the observable ratios, one series per observable.
    pub observables: Vec<(String, Vec<f64>)>,
    /// Largest imaginary part met while reading observables.
    pub max_imag_residue: f64,
}

impl EvolutionTrace {
    fn start(rho0: &StateVector, observables: &[(String, Observable)]) -> Result<Self> {
        let mut trace = Self {
            times: Vec::new(),
            states: Vec::new(),
            step_probs: Vec::new(),
            cumulative_prob: Vec::new(),
            observables: observables.iter().map(|(name, _)| (name.clone(), Vec::new())).collect(),
            max_imag_residue: 0.0,
        };
        trace.record(0.0, rho0.normalized()?, 1.0, observables)?;
        Ok(trace)
    }

    fn record(&mut self, t: f64, state: StateVector, p: f64, observables: &[(String, Observable)]) -> Result<()> {
        for ((_, series), (_, m)) in self.observables.iter_mut().zip(observables) {
            let v = expectation_complex(&state, m)?;
            self.max_imag_residue = self.max_imag_residue.max(v.im.abs());
            series.push(v.re);
        }
        let cum = self.cumulative_prob.last().copied().unwrap_or(1.0) * p;
        self.times.push(t);
        self.states.push(state);
        self.step_probs.push(p);
        self.cumulative_prob.push(cum);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trace holds the initial state")
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
    }
}

/// Run `n_steps` steps of `method` from `rho0`. Errors carry the index of
/// the failing step.
pub fn evolve_trace(
    model: &LindbladModel,
    step: &StepOperator,
    rho0: &StateVector,
    n_steps: usize,
    method: &Method,
    observables: &[(String, Observable)],
) -> Result<EvolutionTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if rho0.num_qubits() != step.state_qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << step.state_qubits(), found: rho0.dim() });
    }
    let propagator = match method {
        Method::Reference => Some(reference_propagator(model, step.dt())?),
        _ => None,
    };
    let mut trace = EvolutionTrace::start(rho0, observables)?;
    for k in 1..=n_steps {
        let current = trace.final_state();
        let (next, p) = match method {
            Method::ExactLcu => step_exact_lcu(current, step),
            Method::Algorithm3(c) => step_algorithm3(current, c),
            Method::Algorithm4(c) => step_algorithm4(current, c),
            Method::Reference => reference_step(propagator.as_ref().expect("built above"), current),
        }
        .map_err(|e| e.at_step(k))?;
        trace.record(k as f64 * step.dt(), next, p, observables).map_err(|e| e.at_step(k))?;
    }
    Ok(trace)
}

/// `e^{ĤΔt}` for the model's dense superoperator.
pub fn reference_propagator(model: &LindbladModel, dt: f64) -> Result<DenseOperator> {
    expm(&model.superoperator().scale(C64::new(dt, 0.0)))
}

fn reference_step(prop: &DenseOperator, state: &StateVector) -> Result<(StateVector, f64)> {
    let next = prop.apply(state)?;
    Ok((next.normalized()?, 1.0))
}

/// Exact trajectory with `n_steps` steps of `T / n_steps`, one matrix
/// exponential reused for every step.
pub fn exact_reference(
    model: &LindbladModel,
    rho0: &StateVector,
    total_time: f64,
    n_steps: usize,
    observables: &[(String, Observable)],
) -> Result<EvolutionTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let dt = total_time / n_steps as f64;
    let prop = reference_propagator(model, dt)?;
    let mut trace = EvolutionTrace::start(rho0, observables)?;
    for k in 1..=n_steps {
        let (next, p) = reference_step(&prop, trace.final_state()).map_err(|e| e.at_step(k))?;
        trace.record(k as f64 * dt, next, p, observables).map_err(|e| e.at_step(k))?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{amplitude_damping_model, random_model};
    use crate::qcore::Pauli;
    use crate::random::{density_matrix, seeded};
    use crate::vectorize::{build_generator, devectorize, trace_of, vectorize_density};
    use alloc::vec;
    use proptest::prelude::*;

    fn rho_vec(seed: u64, n: usize) -> StateVector {
        vectorize_density(&density_matrix(&mut seeded(seed), n)).normalized().unwrap()
    }

    fn first_order(model: &LindbladModel, dt: f64) -> DenseOperator {
        let mut q = DenseOperator::identity(2 * model.num_system_qubits());
        q.add_scaled(C64::new(dt, 0.0), &model.superoperator()).unwrap();
        q
    }

    #[test]
    fn generic_damping_step_pads_to_sixteen() {
        let gen = build_generator(&amplitude_damping_model(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(gen.len(), 11);
        let step = build_step(&gen, 0.01, 1).unwrap();
        assert_eq!(step.lcu().len(), 16);
        assert_eq!(step.num_ancillas(), 4);
        assert_eq!(step.state_qubits(), 2);
        assert!(step.lcu().weights()[11..].iter().all(|&w| (w - 0.2).abs() < 1e-15));
    }

    #[test]
    fn empty_generator_gives_identity_halves() {
        let step = build_step(&LcuOperator::empty(2), 0.1, 1).unwrap();
        assert_eq!(step.lcu().weights(), vec![0.5, 0.5]);
        assert!(step.lcu().dense().max_abs_diff(&DenseOperator::identity(2)) < 1e-15);
    }

    #[test]
    fn step_arguments_are_checked() {
        let gen = LcuOperator::empty(2);
        assert!(matches!(build_step(&gen, 0.1, 2), Err(Error::Unsupported(_))));
        assert!(build_step(&gen, 0.0, 1).is_err());
        assert!(build_step(&gen, f64::NAN, 1).is_err());
        let three = vec![LcuTerm::identity(1.0, 1), LcuTerm::identity(1.0, 1), LcuTerm::identity(1.0, 1)];
        assert!(StepOperator::from_terms(1, three, 0.1).is_err());
    }

    #[test]
    fn ancilla_states() {
        let terms = vec![LcuTerm::identity(3.0, 1), LcuTerm::identity(1.0, 1)];
        let step = StepOperator::from_terms(1, terms, 0.1).unwrap();
        let a = step.ancilla_state();
        assert!((a.amplitudes()[0].re - 0.75f64.sqrt()).abs() < 1e-15);
        let ap = step.ancilla_state_prime();
        assert!((ap.amplitudes()[0].re - 3.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn one_step_error_is_second_order() {
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let gen = build_generator(&model).unwrap();
        let rho = rho_vec(1, 1);
        let err = |dt: f64| {
            let q = build_step(&gen, dt, 1).unwrap().lcu().dense().apply(&rho).unwrap();
            let e = reference_propagator(&model, dt).unwrap().apply(&rho).unwrap();
            q.distance(&e).unwrap()
        };
        let slope = (err(0.02) / err(0.01)).log2();
        assert!((slope - 2.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn reference_preserves_trace_and_relaxes() {
        let model = amplitude_damping_model(0.0, 0.0, 1.0).unwrap();
        let rho0 = rho_vec(2, 1);
        let prop = reference_propagator(&model, 0.3).unwrap();
        let tr0 = trace_of(&rho0).unwrap();
        assert!((trace_of(&prop.apply(&rho0).unwrap()).unwrap() - tr0).norm() < 1e-12);

        let z = [("z".into(), Observable::single(1, 0, Pauli::Z))];
        let trace = exact_reference(&model, &rho0, 30.0, 60, &z).unwrap();
        assert_eq!(trace.len(), 61);
        assert!((trace.series("z").unwrap()[60] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn steady_state_is_fixed_by_reference() {
        // The null vector of the generator, found by replacing one row with the trace.
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let l = model.superoperator();
        let mut a: Vec<C64> = l.data().to_vec();
        let id = crate::vectorize::identity_vector(1, false);
        for (k, v) in id.amplitudes().iter().enumerate() {
            a[k] = v.conj();
        }
        let mut b = vec![C64::new(0.0, 0.0); 4];
        b[0] = C64::new(1.0, 0.0);
        crate::qcore::linalg::lu_solve(a, 4, &mut b).unwrap();
        let ss = StateVector::new(b).unwrap().normalized().unwrap();
        let next = reference_propagator(&model, 0.5).unwrap().apply(&ss).unwrap();
        assert!(next.distance(&ss).unwrap() < 1e-10);
        assert!(devectorize(&ss).unwrap().is_hermitian(1e-12));
    }

    #[test]
    fn degraded_ancilla_has_requested_fidelity() {
        let a = StateVector::from_real(&[0.9, 0.1, 0.3, 0.3]).unwrap().normalized().unwrap();
        for f in [1.0, 0.9999, 0.9984, 0.5] {
            let u = degraded_ancilla(&a, f, &mut seeded(1)).unwrap();
            assert!(u.is_normalized());
            assert!((u.fidelity(&a).unwrap() - f).abs() < 1e-12);
        }
        assert!(degraded_ancilla(&a, 1.5, &mut seeded(1)).is_err());
    }

    #[test]
    fn uniform_weights_give_equal_probabilities() {
        let mut rng = seeded(3);
        let terms = (0..4).map(|_| LcuTerm::dense(0.25, crate::random::haar_unitary(&mut rng, 2)).unwrap()).collect();
        let step = StepOperator::from_terms(2, terms, 0.1).unwrap();
        let rho = rho_vec(4, 1);
        let (_, p) = step_algorithm3(&rho, &Components::exact_algorithm3(&step).unwrap()).unwrap();
        let (_, pp) = step_algorithm4(&rho, &Components::exact_algorithm4(&step).unwrap()).unwrap();
        assert!((p - pp).abs() < 1e-12);
    }

    #[test]
    fn annihilated_state_reports_step() {
        let terms = vec![LcuTerm::identity(0.5, 2), LcuTerm::dense(0.5, DenseOperator::identity(2).scale(C64::new(-1.0, 0.0))).unwrap()];
        let step = StepOperator::from_terms(2, terms, 0.1).unwrap();
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let err = evolve_trace(&model, &step, &rho_vec(1, 1), 3, &Method::ExactLcu, &[]).unwrap_err();
        assert!(matches!(err, Error::Step { index: 1, .. }), "{err}");
    }

    #[test]
    fn trace_bookkeeping() {
        let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
        let step = build_step(&build_generator(&model).unwrap(), 0.01, 1).unwrap();
        let obs = [("x".into(), Observable::single(1, 0, Pauli::X))];
        let t = evolve_trace(&model, &step, &rho_vec(5, 1), 10, &Method::ExactLcu, &obs).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.step_probs[0], 1.0);
        assert!((t.times[10] - 0.1).abs() < 1e-15);
        let prod: f64 = t.step_probs.iter().product();
        assert!((t.cumulative_prob[10] - prod).abs() < 1e-15);
        assert!(t.cumulative_prob.windows(2).all(|w| w[1] <= w[0]));
        assert!(t.max_imag_residue < 1e-12);
        assert!(t.series("x").is_some() && t.series("y").is_none());
        assert!(evolve_trace(&model, &step, &rho_vec(5, 1), 0, &Method::ExactLcu, &obs).is_err());
        assert!(evolve_trace(&model, &step, &rho_vec(5, 2), 1, &Method::ExactLcu, &obs).is_err());
        assert_eq!(Method::Reference.name(), "exact");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn step_is_first_order_propagator(seed in any::<u64>(), n in 1usize..3, dt in 0.001f64..0.1) {
            let model = random_model(&mut seeded(seed), n).unwrap();
            let step = build_step(&build_generator(&model).unwrap(), dt, 1).unwrap();
            prop_assert!(step.lcu().dense().max_abs_diff(&first_order(&model, dt)) < 1e-12);
        }

        #[test]
        fn circuit_algorithms_agree(seed in any::<u64>()) {
            let model = random_model(&mut seeded(seed), 1).unwrap();
            let step = build_step(&build_generator(&model).unwrap(), 0.05, 1).unwrap();
            let rho = rho_vec(seed ^ 1, 1);
            let (s2, p2) = step_exact_lcu(&rho, &step).unwrap();
            let (s3, p3) = step_algorithm3(&rho, &Components::exact_algorithm3(&step).unwrap()).unwrap();
            let (s4, p4) = step_algorithm4(&rho, &Components::exact_algorithm4(&step).unwrap()).unwrap();
            prop_assert!(s2.distance(&s3).unwrap() < 1e-9);
            prop_assert!(s2.distance(&s4).unwrap() < 1e-9);
            prop_assert!((p2 - p3).abs() < 1e-12);
            let q = step.lcu().apply(&rho).unwrap().norm_sqr();
            let expect = q / ((1usize << step.num_ancillas()) as f64 * step.lcu().a_prime());
            prop_assert!((p4 - expect).abs() < 1e-12);
            let w = step.lcu().weights();
            if w.iter().all(|&a| (a - w[0]).abs() < 1e-15) {
                prop_assert!((p3 - p4).abs() < 1e-12);
            } else {
                prop_assert!(p3 > p4, "{p3} {p4} {w:?}");
            }
        }
    }
}
