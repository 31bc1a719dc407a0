//! Variational state preparation of classical vectors.
//!
//! Every target is first mapped to a state with nonnegative real amplitudes:
//!
//! * nonnegative (or all-nonpositive) real `x`: `x` itself, on `d` qubits;
//! * mixed-sign real `x`: `|0>|x₊> + |1>||x₋|>` on `d + 1` qubits;
//! * complex `x`: the four sign parts of the real and imaginary components
//!   in blocks `|00>`, `|01>`, `|10>`, `|11>` on `d + 2` qubits.
//!
//! A circuit is trained to reproduce that state by matching both the sum of
//! amplitudes (which rules out sign errors) and the measured distribution.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is in the build
use num_traits::Float;
use rand::Rng;

use crate::ansatz::GateKind;
use crate::ansatz::ParameterizedCircuit;
use crate::optimize::{minimize_observed, restart_inits, OptOptions, OptResult};
use crate::qcore::gates::{h_local, s_local};
use crate::qcore::local::LocalGate;
use crate::qcore::StateVector;
use crate::random::seeded;
use crate::{Error, Result, C64};
use core::f64::consts::PI;

/// Lower clamp on probabilities inside the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Real entries of a single sign.
    Nonnegative,
    /// Real entries of both signs.
    Real,
    Complex,
}

impl Case {
    /// Extra qubits used by the embedding.
    pub fn ancillas(self) -> usize {
        match self {
            Case::Nonnegative => 0,
            Case::Real => 1,
            Case::Complex => 2,
        }
    }
}

/// A classified unit vector of length `D = 2^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    entries: Vec<C64>,
    case: Case,
    /// Global phase removed on ingestion: `x = phase · entries`.
    phase: C64,
    /// `(𝒟₊, 𝒟₋)` for the real parts (zeros go to `𝒟₊`).
    real_sets: (Vec<usize>, Vec<usize>),
    /// `(𝒟₊, 𝒟₋)` for the imaginary parts; empty unless complex.
    imag_sets: (Vec<usize>, Vec<usize>),
}

impl TargetVector {
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn phase(&self) -> C64 {
        self.phase
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.entries.len().trailing_zeros() as usize
    }

    /// Qubits of the embedded state.
    pub fn embedded_qubits(&self) -> usize {
        self.num_qubits() + self.case.ancillas()
    }

    pub fn real_sets(&self) -> (&[usize], &[usize]) {
        (&self.real_sets.0, &self.real_sets.1)
    }

    pub fn imag_sets(&self) -> (&[usize], &[usize]) {
        (&self.imag_sets.0, &self.imag_sets.1)
    }

    /// The original vector, including any removed phase.
    pub fn original(&self) -> StateVector {
        StateVector::new(self.entries.iter().map(|v| v * self.phase).collect()).expect("power of two")
    }
}

/// Sort a unit vector into one of the three cases.
pub fn classify(x: &[C64]) -> Result<TargetVector> {
    let d = x.len();
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-8) {
        return Err(Error::NotNormalized(norm));
    }
    let real = x.iter().all(|v| v.im.abs() <= SIGN_TOL);
    let sets = |vals: &mut dyn Iterator<Item = f64>| -> (Vec<usize>, Vec<usize>) {
        let (mut p, mut m) = (Vec::new(), Vec::new());
        for (i, v) in vals.enumerate() {
            if v >= 0.0 {
                p.push(i);
            } else {
                m.push(i);
            }
        }
        (p, m)
    };
    if real {
        let mut entries: Vec<C64> = x.iter().map(|v| C64::new(v.re, 0.0)).collect();
        let nonneg = entries.iter().all(|v| v.re >= 0.0);
        let nonpos = entries.iter().all(|v| v.re <= 0.0);
        if nonneg || nonpos {
            let phase = if nonneg { 1.0 } else { -1.0 };
            entries.iter_mut().for_each(|v| *v *= phase);
            let real_sets = ((0..d).collect(), Vec::new());
            return Ok(TargetVector {
                entries,
                case: Case::Nonnegative,
                phase: C64::new(phase, 0.0),
                real_sets,
                imag_sets: (Vec::new(), Vec::new()),
            });
        }
        let real_sets = sets(&mut entries.iter().map(|v| v.re));
        return Ok(TargetVector { entries, case: Case::Real, phase: C64::new(1.0, 0.0), real_sets, imag_sets: (Vec::new(), Vec::new()) });
    }
    let entries = x.to_vec();
    let real_sets = sets(&mut entries.iter().map(|v| v.re));
    let imag_sets = sets(&mut entries.iter().map(|v| v.im));
    Ok(TargetVector { entries, case: Case::Complex, phase: C64::new(1.0, 0.0), real_sets, imag_sets })
}

/// The nonnegative state the circuit is trained to prepare.
pub fn embedded_target(x: &TargetVector) -> StateVector {
    let d = x.dim();
    let amps: Vec<f64> = match x.case {
        Case::Nonnegative => x.entries.iter().map(|v| v.re).collect(),
        Case::Real => {
            let mut a = vec![0.0; 2 * d];
            for (j, v) in x.entries.iter().enumerate() {
                a[if v.re >= 0.0 { j } else { d + j }] = v.re.abs();
            }
            a
        }
        Case::Complex => {
            let mut a = vec![0.0; 4 * d];
            for (j, v) in x.entries.iter().enumerate() {
                a[if v.re >= 0.0 { j } else { d + j }] = v.re.abs();
                a[if v.im >= 0.0 { 2 * d + j } else { 3 * d + j }] = v.im.abs();
            }
            a
        }
    };
    StateVector::from_real(&amps).expect("power of two")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbMode {
    Exact,
    Sampled { shots: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    pub probs: Vec<f64>,
    pub mode: ProbMode,
}

/// Computational-basis outcome probabilities, exact or as frequencies of
/// `shots` seeded draws.
pub fn estimate_probs<R: Rng + ?Sized>(s: &StateVector, mode: ProbMode, rng: &mut R) -> Result<ProbabilityDistribution> {
    if !s.is_normalized() {
        return Err(Error::NotNormalized(s.norm()));
    }
    let exact = s.probabilities();
    let probs = match mode {
        ProbMode::Exact => exact,
        ProbMode::Sampled { shots: 0 } => return Err(Error::InvalidArgument("shot count must be positive".into())),
        ProbMode::Sampled { shots } => {
            let mut cdf = Vec::with_capacity(exact.len());
            let mut acc = 0.0;
            for p in &exact {
                acc += p;
                cdf.push(acc);
            }
            let mut counts = vec![0usize; exact.len()];
            for _ in 0..shots {
                let u = rng.random::<f64>() * acc;
                let k = cdf.partition_point(|&c| c <= u).min(exact.len() - 1);
                counts[k] += 1;
            }
            counts.into_iter().map(|c| c as f64 / shots as f64).collect()
        }
    };
    Ok(ProbabilityDistribution { probs, mode })
}

/// `Σ t_i² log(t_i² / P_i)` over indices where the embedded target `t` is
/// nonzero.
pub fn kl_term(target: &StateVector, probs: &[f64]) -> f64 {
    target
        .amplitudes()
        .iter()
        .zip(probs)
        .filter(|(t, _)| t.re > 0.0)
        .map(|(t, p)| {
            let q = t.re * t.re;
            q * (q / p.max(PROB_FLOOR)).ln()
        })
        .sum()
}

/// `|Σ_k Φ_k − Σ_i t_i| + KL(t² ‖ P)` for a prepared state `Φ` with outcome
/// distribution `P`. `Σ_k Φ_k = √(2^q) <+^q|Φ>`.
pub fn cost_from(phi: &StateVector, probs: &[f64], target: &StateVector) -> f64 {
    let overlap: C64 = phi.amplitudes().iter().sum();
    let mass: f64 = target.amplitudes().iter().map(|t| t.re).sum();
    (overlap - mass).norm() + kl_term(target, probs)
}

fn check_circuit(x: &TargetVector, circuit: &ParameterizedCircuit) -> Result<()> {
    if circuit.num_qubits() != x.embedded_qubits() {
        return Err(Error::DimensionMismatch { expected: x.embedded_qubits(), found: circuit.num_qubits() });
    }
    Ok(())
}

/// Exact-probability cost.
pub fn cost(params: &[f64], x: &TargetVector, circuit: &ParameterizedCircuit) -> Result<f64> {
    check_circuit(x, circuit)?;
    let phi = circuit.evaluate_state(params)?;
    Ok(cost_from(&phi, &phi.probabilities(), &embedded_target(x)))
}

/// Cost with the distribution replaced by `shots` samples. The amplitude-sum
/// term is kept exact.
pub fn cost_sampled<R: Rng + ?Sized>(
    params: &[f64],
    x: &TargetVector,
    circuit: &ParameterizedCircuit,
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    check_circuit(x, circuit)?;
    let phi = circuit.evaluate_state(params)?;
    let probs = estimate_probs(&phi, ProbMode::Sampled { shots }, rng)?;
    Ok(cost_from(&phi, &probs.probs, &embedded_target(x)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub params: Vec<f64>,
    /// `|<embedded target|Φ(θ)>|²`.
    pub fidelity: f64,
    pub state: StateVector,
    pub opt: OptResult,
}

/// Starting points for [`train`], one per start of `opts`.
///
/// The logarithm in the cost diverges wherever a target-carrying amplitude
/// crosses zero, so training cannot change the sign of such an amplitude.
/// Every start therefore begins from a product state with positive
/// amplitudes: the first `Ry` on each qubit is set so that, after the fixed
/// gates of the circuit, the single-qubit marginals match those of the
/// target. Later starts perturb those angles by `restart_scale`, clamped to
/// `(0, π)`; all other angles are drawn from `(−init_scale, init_scale)`.
pub fn positive_inits(x: &TargetVector, circuit: &ParameterizedCircuit, opts: &OptOptions) -> Result<Vec<Vec<f64>>> {
    check_circuit(x, circuit)?;
    let n = circuit.parameter_count();
    let nq = circuit.num_qubits();
    let zeros = vec![0.0; n];
    let mut first = vec![None; nq];
    for op in circuit.ops(&zeros)? {
        if let (GateKind::Ry, Some(k), LocalGate::One { qubit: q, .. }) = (op.kind, op.param, op.gate) {
            first[q].get_or_insert(k);
        }
    }
    // Pull the target back through the circuit with every angle at zero.
    let pulled = circuit.evaluate_unitary(&zeros)?.adjoint().apply(&embedded_target(x))?;
    let probs = pulled.probabilities();
    let angles: Vec<f64> = (0..nq)
        .map(|q| {
            let bit = 1 << (nq - 1 - q);
            let p1: f64 = probs.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, p)| p).sum();
            2.0 * p1.clamp(0.0, 1.0).sqrt().asin()
        })
        .collect();
    let local = OptOptions { restart_scale: opts.init_scale, ..*opts };
    Ok(restart_inits(n, &local)
        .into_iter()
        .enumerate()
        .map(|(start, mut p)| {
            let mut rng = seeded(opts.seed ^ 0x5bd1_e995 ^ start as u64);
            for (q, k) in first.iter().enumerate() {
                if let Some(k) = *k {
                    let jitter = if start == 0 { 0.0 } else { rng.random_range(-1.0..1.0) * opts.restart_scale };
                    p[k] = (angles[q] + jitter).clamp(1e-3, PI - 1e-3);
                }
            }
            p
        })
        .collect())
}

/// Per-trial step cap used by [`train`] when `opts.max_step` is unset.
pub const TRAIN_MAX_STEP: f64 = 0.02;

/// The cost with its first term squared, which removes the kink at the
/// optimum. Both vanish exactly at the target.
pub fn smoothed_cost_from(phi: &StateVector, probs: &[f64], target: &StateVector) -> f64 {
    let overlap: C64 = phi.amplitudes().iter().sum();
    let mass: f64 = target.amplitudes().iter().map(|t| t.re).sum();
    (overlap - mass).norm_sqr() + kl_term(target, probs)
}

/// One training run from `init`.
///
/// Minimizes [`smoothed_cost_from`] with line-search trials capped at
/// `opts.max_step` (default [`TRAIN_MAX_STEP`]) per angle. Large steps let
/// small amplitudes jump across zero into the wrong sign, where the
/// logarithmic term then holds them. `best_cost` and `cost_history` of the
/// result are exact-cost values.
pub fn train_start(x: &TargetVector, circuit: &ParameterizedCircuit, init: &[f64], opts: &OptOptions) -> Result<OptResult> {
    check_circuit(x, circuit)?;
    let target = embedded_target(x);
    let run_opts = OptOptions { max_step: opts.max_step.or(Some(TRAIN_MAX_STEP)), ..*opts };
    let smooth = |p: &[f64]| match circuit.evaluate_state(p) {
        Ok(phi) => smoothed_cost_from(&phi, &phi.probabilities(), &target),
        Err(_) => f64::NAN,
    };
    let exact = |p: &[f64]| -> Result<f64> {
        let phi = circuit.evaluate_state(p)?;
        Ok(cost_from(&phi, &phi.probabilities(), &target))
    };
    let mut history = Vec::new();
    let mut run = minimize_observed(&smooth, init, &run_opts, &mut |p, _| history.push(exact(p)))?;
    run.cost_history = history.into_iter().collect::<Result<_>>()?;
    run.best_cost = *run.cost_history.last().expect("start point recorded");
    Ok(run)
}

/// Fidelity and state for trained parameters.
pub fn finish(x: &TargetVector, circuit: &ParameterizedCircuit, opt: OptResult) -> Result<TrainResult> {
    let state = circuit.evaluate_state(&opt.best_params)?;
    let fidelity = embedded_target(x).fidelity(&state)?;
    Ok(TrainResult { params: opt.best_params.clone(), fidelity, state, opt })
}

/// [`train_start`] from each start of [`positive_inits`], keeping the
/// lowest exact cost and stopping early once it reaches `opts.target_cost`.
pub fn train(x: &TargetVector, circuit: &ParameterizedCircuit, opts: &OptOptions) -> Result<TrainResult> {
    let mut best: Option<OptResult> = None;
    for init in positive_inits(x, circuit, opts)? {
        let run = train_start(x, circuit, &init, opts)?;
        let done = opts.target_cost.is_some_and(|t| run.best_cost <= t);
        if best.as_ref().is_none_or(|b| run.best_cost < b.best_cost) {
            best = Some(run);
        }
        if done {
            break;
        }
    }
    finish(x, circuit, best.expect("at least one start"))
}

/// Undo the embedding: the system state and the probability of the
/// post-selection that produced it.
pub fn recover(trained: &StateVector, case: Case) -> Result<(StateVector, f64)> {
    let nq = trained.num_qubits();
    let anc = case.ancillas();
    if nq <= anc {
        return Err(Error::InvalidArgument(format!("{nq}-qubit state cannot hold {anc} ancillas and a system")));
    }
    let mut amps = trained.amplitudes().to_vec();
    let outcome = match case {
        Case::Nonnegative => return Ok((trained.clone(), 1.0)),
        Case::Real => {
            h_local(0).apply_state(&mut amps, nq);
            1
        }
        Case::Complex => {
            s_local(0).apply_state(&mut amps, nq);
            h_local(1).apply_state(&mut amps, nq);
            h_local(0).apply_state(&mut amps, nq);
            0b01
        }
    };
    let block = 1usize << (nq - anc);
    let projected = StateVector::new(amps[outcome * block..(outcome + 1) * block].to_vec())?;
    let p = projected.norm_sqr();
    if p < 1e-12 {
        return Err(Error::DegenerateProjection(p));
    }
    Ok((projected.scale(C64::new(1.0 / p.sqrt(), 0.0)), p))
}
