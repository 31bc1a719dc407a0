//! End-to-end pipelines: train the ancilla preparation, compile the select
//! operator, evolve, read out.

use std::collections::HashMap;

use oqsim_core::ansatz::{minimize_from, restart_inits, OptResult, ParameterizedCircuit};
use oqsim_core::compile::{average_fidelity, build_select, HstObjective};
use oqsim_core::evolve::{build_step, degraded_ancilla, evolve_trace, exact_reference, Components, EvolutionTrace, Method, StepOperator};
use oqsim_core::measure::Observable;
use oqsim_core::models::{amplitude_damping_model, amplitude_damping_step, dtfim_model};
use oqsim_core::qcore::{DenseOperator, Pauli, PauliTerm, StateVector};
use oqsim_core::random::seeded;
use oqsim_core::vectorize::{build_generator, LindbladModel};
use oqsim_core::vqsp;
use oqsim_core::C64;
use serde::Serialize;

use crate::config::{parse_observable, Algorithm, AncillaSpec, CircuitSpec, ExperimentConfig, ModelSpec, SelectSpec, StepKind};
use crate::parallel::{best_start, thread_count};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBundle {
    pub config: ExperimentConfig,
    /// Ancilla qubits `m` of the step.
    pub num_ancillas: usize,
    pub step_weights: Vec<f64>,
    pub reference: Option<TraceRecord>,
    pub variants: Vec<VariantResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub times: Vec<f64>,
    pub observables: Vec<(String, Vec<f64>)>,
    pub step_probs: Vec<f64>,
    pub cumulative_prob: Vec<f64>,
    pub max_imag_residue: f64,
}

impl From<&EvolutionTrace> for TraceRecord {
    fn from(t: &EvolutionTrace) -> Self {
        Self {
            times: t.times.clone(),
            observables: t.observables.clone(),
            step_probs: t.step_probs.clone(),
            cumulative_prob: t.cumulative_prob.clone(),
            max_imag_residue: t.max_imag_residue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantResult {
    pub label: String,
    pub algorithm: Algorithm,
    pub ancilla: Option<TrainingRecord>,
    /// `|<a|u>|²` between the exact and the used ancilla state.
    pub ancilla_fidelity: Option<f64>,
    pub select: Option<TrainingRecord>,
    pub trace: Option<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingRecord {
    pub depth: usize,
    pub parameters: Vec<f64>,
    pub final_cost: f64,
    /// State fidelity for ancillas, Haar-averaged gate fidelity for selects.
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// A failed stage, with everything computed before it.
#[derive(Debug, thiserror::Error)]
#[error("stage {stage}: {source}")]
pub struct StageError {
    pub stage: String,
    #[source]
    pub source: oqsim_core::Error,
    pub partial: Box<ResultBundle>,
}

/// Deterministic per-purpose seed.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    // FNV-1a over the key, folded into the experiment seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

pub fn build_model(spec: &ModelSpec) -> oqsim_core::Result<LindbladModel> {
    match *spec {
        ModelSpec::AmplitudeDamping { delta, omega, gamma } => amplitude_damping_model(delta, omega, gamma),
        ModelSpec::Dtfim { v, omega, gamma } => dtfim_model(v, omega, gamma),
    }
}

pub fn build_step_for(cfg: &ExperimentConfig, model: &LindbladModel) -> oqsim_core::Result<StepOperator> {
    match (cfg.step, &cfg.model) {
        (StepKind::EightTerm, ModelSpec::AmplitudeDamping { delta, omega, gamma }) => {
            amplitude_damping_step(*delta, *omega, *gamma, cfg.dt)
        }
        _ => build_step(&build_generator(model)?, cfg.dt, 1),
    }
}

/// `|b><b|` vectorized, for a system bitstring `b`.
pub fn initial_state(bits: &str) -> StateVector {
    let n = bits.len();
    let b = usize::from_str_radix(bits, 2).expect("validated bitstring");
    StateVector::basis(2 * n, (b << n) | b)
}

pub fn build_observables(names: &[String], num_qubits: usize) -> Vec<(String, Observable)> {
    names
        .iter()
        .map(|name| {
            let parts = parse_observable(name, num_qubits).expect("validated observable");
            let w = 1.0 / parts.len() as f64;
            let terms = parts
                .into_iter()
                .map(|(q, c)| (w, PauliTerm::single(num_qubits, q, Pauli::from_char(c).expect("letter"), C64::new(1.0, 0.0))))
                .collect();
            (name.clone(), Observable::new(num_qubits, terms).expect("well-formed terms"))
        })
        .collect()
}

/// Which ancilla vector a circuit variant needs.
fn ancilla_target(step: &StepOperator, alg: Algorithm) -> StateVector {
    match alg {
        Algorithm::Alg4 => step.ancilla_state_prime(),
        _ => step.ancilla_state(),
    }
}

fn circuit_for(spec: &CircuitSpec, num_qubits: usize) -> oqsim_core::Result<ParameterizedCircuit> {
    ParameterizedCircuit::hardware_efficient(num_qubits, spec.depth, spec.rotation.into(), spec.entangler.into())
}

/// Train `U` with `U|0> ≈ target`.
pub fn train_ancilla(
    target: &StateVector,
    spec: &CircuitSpec,
    cfg: &ExperimentConfig,
    seed: u64,
    threads: usize,
) -> oqsim_core::Result<(DenseOperator, StateVector, TrainingRecord)> {
    let x = vqsp::classify(target.amplitudes())?;
    let circuit = circuit_for(spec, x.embedded_qubits())?;
    let opts = spec.optimizer.as_ref().unwrap_or(&cfg.optimizer).options(seed);
    let inits = vqsp::positive_inits(&x, &circuit, &opts)?;
    let best = best_start(&inits, opts.target_cost, threads, |x0| vqsp::train_start(&x, &circuit, x0, &opts))?;
    let trained = vqsp::finish(&x, &circuit, best)?;
    let u = circuit.evaluate_unitary(&trained.params)?;
    let record = TrainingRecord {
        depth: spec.depth,
        parameters: trained.params.clone(),
        final_cost: trained.opt.best_cost,
        fidelity: trained.fidelity,
        iterations: trained.opt.iterations,
        converged: trained.opt.converged,
        history: trained.opt.cost_history.clone(),
    };
    Ok((u, trained.state, record))
}

/// Compile `Λ_Q` into a circuit on `m + 2n` qubits.
pub fn compile_select(
    target: &DenseOperator,
    spec: &CircuitSpec,
    cfg: &ExperimentConfig,
    seed: u64,
    threads: usize,
) -> oqsim_core::Result<(DenseOperator, TrainingRecord)> {
    let circuit = circuit_for(spec, target.num_qubits())?;
    let opts = spec.optimizer.as_ref().unwrap_or(&cfg.optimizer).options(seed);
    let obj = HstObjective::for_operator(target, &circuit)?;
    let inits = restart_inits(circuit.parameter_count(), &opts);
    let best: OptResult = best_start(&inits, opts.target_cost, threads, |x0| minimize_from(&obj, x0, &opts))?;
    let v = circuit.evaluate_unitary(&best.best_params)?;
    let record = TrainingRecord {
        depth: spec.depth,
        parameters: best.best_params.clone(),
        final_cost: best.best_cost,
        fidelity: average_fidelity(&v, target)?,
        iterations: best.iterations,
        converged: best.converged,
        history: best.cost_history.clone(),
    };
    Ok((v, record))
}

/// [`run_experiment_with`] on [`thread_count`] threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultBundle, StageError> {
    run_experiment_with(cfg, thread_count())
}

/// Run every stage the config names. The thread count affects speed only.
pub fn run_experiment_with(cfg: &ExperimentConfig, threads: usize) -> Result<ResultBundle, StageError> {
    let mut bundle = ResultBundle { config: cfg.clone(), num_ancillas: 0, step_weights: Vec::new(), reference: None, variants: Vec::new() };
    macro_rules! stage {
        ($name:expr, $e:expr) => {
            match $e {
                Ok(v) => v,
                Err(source) => return Err(StageError { stage: $name.to_string(), source, partial: Box::new(bundle) }),
            }
        };
    }
    let model = stage!("model", build_model(&cfg.model));
    let step = stage!("step", build_step_for(cfg, &model));
    bundle.num_ancillas = step.num_ancillas();
    bundle.step_weights = step.lcu().weights();
    let n = model.num_system_qubits();
    let rho0 = initial_state(&cfg.initial_state);
    let observables = build_observables(&cfg.observables, n);
    let reference = stage!("reference", exact_reference(&model, &rho0, cfg.total_time, cfg.steps, &observables));
    bundle.reference = Some(TraceRecord::from(&reference));

    // Trained pieces are shared between variants asking for the same thing.
    let mut ancillas: HashMap<String, (DenseOperator, StateVector, TrainingRecord)> = HashMap::new();
    let mut selects: HashMap<String, (DenseOperator, TrainingRecord)> = HashMap::new();
    let mut exact_select: Option<DenseOperator> = None;

    for v in &cfg.variants {
        let mut result = VariantResult {
            label: v.label.clone(),
            algorithm: v.algorithm,
            ancilla: None,
            ancilla_fidelity: None,
            select: None,
            trace: None,
        };
        let method = match v.algorithm {
            Algorithm::Reference => {
                result.trace = bundle.reference.clone();
                bundle.variants.push(result);
                continue;
            }
            Algorithm::Lcu => Method::ExactLcu,
            Algorithm::Alg3 | Algorithm::Alg4 => {
                let name = format!("{}/select", v.label);
                let select = match &v.select {
                    SelectSpec::Exact => {
                        if exact_select.is_none() {
                            exact_select = Some(stage!(name, build_select(step.lcu())).dense().clone());
                        }
                        exact_select.clone().expect("built above")
                    }
                    SelectSpec::Compiled(spec) => {
                        let key = serde_json::to_string(spec).expect("spec serializes");
                        if !selects.contains_key(&key) {
                            let target = stage!(name, build_select(step.lcu())).dense().clone();
                            let seed = derive_seed(cfg.seed, &format!("select {key}"));
                            let out = stage!(name, compile_select(&target, spec, cfg, seed, threads));
                            selects.insert(key.clone(), out);
                        }
                        let (op, record) = &selects[&key];
                        result.select = Some(record.clone());
                        op.clone()
                    }
                };
                let target = ancilla_target(&step, v.algorithm);
                let name = format!("{}/ancilla", v.label);
                let comps = match &v.ancilla {
                    AncillaSpec::Exact => stage!(name, Components::from_ancilla_state(&target, select)),
                    AncillaSpec::Degraded { fidelity } => {
                        // The error direction depends only on the algorithm, so fidelities are
                        // comparable across variants.
                        let seed = derive_seed(cfg.seed, &format!("degraded {:?}", v.algorithm));
                        let u = stage!(name, degraded_ancilla(&target, *fidelity, &mut seeded(seed)));
                        result.ancilla_fidelity = Some(stage!(name, u.fidelity(&target)));
                        stage!(name, Components::from_ancilla_state(&u, select))
                    }
                    AncillaSpec::Trained(spec) => {
                        let key = format!("{:?} {}", v.algorithm, serde_json::to_string(spec).expect("spec serializes"));
                        if !ancillas.contains_key(&key) {
                            let seed = derive_seed(cfg.seed, &format!("ancilla {key}"));
                            let out = stage!(name, train_ancilla(&target, spec, cfg, seed, threads));
                            ancillas.insert(key.clone(), out);
                        }
                        let (u, state, record) = &ancillas[&key];
                        result.ancilla = Some(record.clone());
                        result.ancilla_fidelity = Some(stage!(name, state.fidelity(&target)));
                        stage!(name, Components::new(u.clone(), select))
                    }
                };
                if v.algorithm == Algorithm::Alg3 {
                    Method::Algorithm3(comps)
                } else {
                    Method::Algorithm4(comps)
                }
            }
        };
        let trace = match evolve_trace(&model, &step, &rho0, cfg.steps, &method, &observables) {
            Ok(t) => t,
            Err(source) => {
                bundle.variants.push(result);
                return Err(StageError { stage: format!("{}/evolve", v.label), source, partial: Box::new(bundle) });
            }
        };
        result.trace = Some(TraceRecord::from(&trace));
        bundle.variants.push(result);
    }
    Ok(bundle)
}
