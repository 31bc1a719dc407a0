//! Experiment configuration files.
//!
//! One experiment per JSON file. Every random choice in a run derives from
//! the `seed` field; there is no wall-clock fallback.

use std::collections::BTreeMap;
use std::path::Path;

use oqsim_core::ansatz::{Entangler, OptOptions, Rotation};
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: ModelSpec,
    /// How `I + ΔtĤ` is split into unitaries.
    #[serde(default)]
    pub step: StepKind,
    pub dt: f64,
    pub total_time: f64,
    pub steps: usize,
    /// Computational basis state of the system, qubit 0 first, e.g. `"00"`.
    pub initial_state: String,
    pub observables: Vec<String>,
    #[serde(default)]
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    /// Which output files to write; see [`crate::output::SERIES_NAMES`].
    #[serde(default = "default_outputs")]
    pub outputs: Vec<String>,
    /// Sample count of the variational baseline in the complexity table.
    #[serde(default = "default_vqa_samples")]
    pub vqa_samples: f64,
}

fn default_outputs() -> Vec<String> {
    vec!["series".into(), "training".into(), "probabilities".into(), "complexity".into()]
}

fn default_vqa_samples() -> f64 {
    1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    AmplitudeDamping { delta: f64, omega: f64, gamma: f64 },
    Dtfim { v: f64, omega: f64, gamma: f64 },
}

impl ModelSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            ModelSpec::AmplitudeDamping { .. } => 1,
            ModelSpec::Dtfim { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Positivized Pauli generator padded with identities.
    #[default]
    Generic,
    /// The hand-combined eight-term table of the damped qubit.
    EightTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub ancilla: AncillaSpec,
    #[serde(default)]
    pub select: SelectSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Matrix exponential only.
    Reference,
    /// `Q(Δt)` applied as a matrix.
    Lcu,
    Alg3,
    Alg4,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AncillaSpec {
    #[default]
    Exact,
    Trained(CircuitSpec),
    /// The exact state mixed with a random orthogonal one at this fidelity.
    Degraded {
        fidelity: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectSpec {
    #[default]
    Exact,
    Compiled(CircuitSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub depth: usize,
    pub rotation: RotationName,
    pub entangler: EntanglerName,
    /// Overrides for the top-level optimizer block.
    #[serde(default)]
    pub optimizer: Option<OptimizerConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationName {
    Ry,
    RzRyRz,
}

impl From<RotationName> for Rotation {
    fn from(r: RotationName) -> Self {
        match r {
            RotationName::Ry => Rotation::Ry,
            RotationName::RzRyRz => Rotation::RzRyRz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerName {
    None,
    Cnot,
    Cz,
    Cry,
}

impl From<EntanglerName> for Entangler {
    fn from(e: EntanglerName) -> Self {
        match e {
            EntanglerName::None => Entangler::None,
            EntanglerName::Cnot => Entangler::Cnot,
            EntanglerName::Cz => Entangler::Cz,
            EntanglerName::Cry => Entangler::Cry,
        }
    }
}

/// Serializable mirror of [`OptOptions`] without the seed, which comes from
/// the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub gtol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub restarts: usize,
    pub init_scale: f64,
    pub restart_scale: f64,
    pub target_cost: Option<f64>,
    pub max_step: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let o = OptOptions::default();
        Self {
            gtol: o.gtol,
            max_iter: o.max_iter,
            fd_step: o.fd_step,
            restarts: o.restarts,
            init_scale: o.init_scale,
            restart_scale: o.restart_scale,
            target_cost: o.target_cost,
            max_step: o.max_step,
        }
    }
}

impl OptimizerConfig {
    pub fn options(&self, seed: u64) -> OptOptions {
        OptOptions {
            gtol: self.gtol,
            max_iter: self.max_iter,
            fd_step: self.fd_step,
            restarts: self.restarts,
            init_scale: self.init_scale,
            restart_scale: self.restart_scale,
            seed,
            target_cost: self.target_cost,
            max_step: self.max_step,
        }
    }
}

/// Observable names accepted in `observables`.
pub const OBSERVABLE_HELP: &str = "sx, sy, sz (qubit 0), x<k>, y<k>, z<k> (qubit k), magnetization";

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.name.is_empty() {
            return bad("name is empty".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        let implied = self.dt * self.steps as f64;
        if (implied - self.total_time).abs() > 1e-12 * self.total_time.abs().max(1.0) {
            return bad(format!("dt·steps = {implied} but total_time = {}", self.total_time));
        }
        let (gamma, nq) = match self.model {
            ModelSpec::AmplitudeDamping { gamma, .. } | ModelSpec::Dtfim { gamma, .. } => (gamma, self.model.num_qubits()),
        };
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return bad(format!("gamma must be nonnegative, got {gamma}"));
        }
        if self.step == StepKind::EightTerm {
            match self.model {
                ModelSpec::AmplitudeDamping { delta, omega, .. } if delta == omega => {}
                ModelSpec::AmplitudeDamping { .. } => return bad("eight_term step needs delta = omega".into()),
                _ => return bad("eight_term step only exists for amplitude_damping".into()),
            }
        }
        if self.initial_state.len() != nq || !self.initial_state.chars().all(|c| c == '0' || c == '1') {
            return bad(format!("initial_state must be a {nq}-character bitstring, got {:?}", self.initial_state));
        }
        if self.observables.is_empty() {
            return bad("no observables".into());
        }
        for o in &self.observables {
            if parse_observable(o, nq).is_none() {
                return bad(format!("unknown observable {o:?} (expected {OBSERVABLE_HELP})"));
            }
        }
        let mut seen = BTreeMap::new();
        for v in &self.variants {
            if v.label.is_empty() || v.label == "exact" || !v.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return bad(format!("variant label {:?} must be nonempty [A-Za-z0-9_-] and not \"exact\"", v.label));
            }
            if seen.insert(v.label.clone(), ()).is_some() {
                return bad(format!("duplicate variant label {:?}", v.label));
            }
            let circuit = matches!(v.algorithm, Algorithm::Alg3 | Algorithm::Alg4);
            if !circuit && (v.ancilla != AncillaSpec::Exact || v.select != SelectSpec::Exact) {
                return bad(format!("variant {:?}: only alg3 and alg4 take ancilla and select settings", v.label));
            }
            if let AncillaSpec::Degraded { fidelity } = v.ancilla {
                if !(0.0..=1.0).contains(&fidelity) {
                    return bad(format!("variant {:?}: fidelity {fidelity} outside [0, 1]", v.label));
                }
            }
            for spec in [v.ancilla_circuit(), v.select_circuit()].into_iter().flatten() {
                if spec.depth == 0 {
                    return bad(format!("variant {:?}: circuit depth must be at least 1", v.label));
                }
            }
        }
        if !(self.vqa_samples > 0.0) {
            return bad("vqa_samples must be positive".into());
        }
        for o in &self.outputs {
            if !crate::output::SERIES_NAMES.contains(&o.as_str()) {
                return Err(ConfigError::UnknownSeries(o.clone()));
            }
        }
        Ok(())
    }
}

impl Variant {
    pub fn ancilla_circuit(&self) -> Option<&CircuitSpec> {
        match &self.ancilla {
            AncillaSpec::Trained(c) => Some(c),
            _ => None,
        }
    }

    pub fn select_circuit(&self) -> Option<&CircuitSpec> {
        match &self.select {
            SelectSpec::Compiled(c) => Some(c),
            _ => None,
        }
    }
}

/// `(qubit, letter)` pairs of a named observable; the observable is their
/// average.
pub fn parse_observable(name: &str, num_qubits: usize) -> Option<Vec<(usize, char)>> {
    match name {
        "sx" => return Some(vec![(0, 'X')]),
        "sy" => return Some(vec![(0, 'Y')]),
        "sz" => return Some(vec![(0, 'Z')]),
        "magnetization" => return Some((0..num_qubits).map(|q| (q, 'Z')).collect()),
        _ => {}
    }
    let (head, tail) = name.split_at(1.min(name.len()));
    let letter = match head {
        "x" => 'X',
        "y" => 'Y',
        "z" => 'Z',
        _ => return None,
    };
    let q: usize = tail.parse().ok()?;
    (q < num_qubits).then(|| vec![(q, letter)])
}

/// Bundled presets: `(name, json)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig5a", include_str!("../../../configs/fig5a.json")),
    ("fig5b", include_str!("../../../configs/fig5b.json")),
    ("fig5cd", include_str!("../../../configs/fig5cd.json")),
    ("fig5ef", include_str!("../../../configs/fig5ef.json")),
    ("fig5g", include_str!("../../../configs/fig5g.json")),
    ("fig5h", include_str!("../../../configs/fig5h.json")),
    ("fig5i", include_str!("../../../configs/fig5i.json")),
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| ExperimentConfig::from_json(text).expect("bundled presets are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"name": "t", "model": {"name": "amplitude_damping", "delta": 1, "omega": 1, "gamma": 1},
                "dt": 0.01, "total_time": 0.1, "steps": 10, "initial_state": "0",
                "observables": ["sz"], "seed": 3}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = minimal();
        assert_eq!(c.step, StepKind::Generic);
        assert_eq!(c.outputs.len(), 4);
        assert_eq!(c.optimizer, OptimizerConfig::default());
        assert_eq!(c.vqa_samples, 1e4);
    }

    #[test]
    fn echo_round_trips() {
        let c = minimal();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_inconsistent_time_grid() {
        let mut c = minimal();
        c.total_time = 0.2;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_bad_fields() {
        let mut c = minimal();
        c.observables = vec!["z3".into()];
        assert!(c.validate().is_err());
        let mut c = minimal();
        c.initial_state = "01".into();
        assert!(c.validate().is_err());
        let mut c = minimal();
        c.outputs = vec!["fig9".into()];
        assert_eq!(c.validate(), Err(ConfigError::UnknownSeries("fig9".into())));
        assert!(ExperimentConfig::from_json(r#"{"name": "t"}"#).is_err());
    }

    #[test]
    fn observable_names() {
        assert_eq!(parse_observable("magnetization", 2), Some(vec![(0, 'Z'), (1, 'Z')]));
        assert_eq!(parse_observable("x1", 2), Some(vec![(1, 'X')]));
        assert_eq!(parse_observable("x2", 2), None);
        assert_eq!(parse_observable("", 2), None);
    }

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            assert_eq!(preset(name).unwrap().name, *name);
        }
    }
}
