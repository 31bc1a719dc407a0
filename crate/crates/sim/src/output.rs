//! CSV plot data and the JSON manifest.
//!
//! Every CSV starts with one `#` line naming its columns, followed by a
//! plain header row. Numbers use the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::{Algorithm, ExperimentConfig};
use crate::runner::{ResultBundle, TrainingRecord};
use crate::OutputError;

/// Names accepted by [`emit_plot_data`] and the config's `outputs` list.
pub const SERIES_NAMES: &[&str] = &["series", "training", "probabilities", "complexity"];

/// A rendered file: name relative to the output directory, and contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub name: String,
    pub contents: String,
}

fn csv(comment: &str, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = String::new();
    writeln!(s, "# {comment}").unwrap();
    writeln!(s, "{}", header.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}

/// Variants with a simulated trajectory, excluding the bare reference.
fn traced(bundle: &ResultBundle) -> impl Iterator<Item = &crate::runner::VariantResult> {
    bundle.variants.iter().filter(|v| v.algorithm != Algorithm::Reference && v.trace.is_some())
}

fn series(bundle: &ResultBundle) -> Vec<Rendered> {
    let Some(reference) = &bundle.reference else { return Vec::new() };
    let mut header = vec!["t".to_string()];
    let mut docs = vec!["t = time".to_string()];
    let mut columns: Vec<&[f64]> = Vec::new();
    for (k, (obs, values)) in reference.observables.iter().enumerate() {
        header.push(format!("{obs}_exact"));
        docs.push(format!("{obs}_exact = <{obs}> under the exact propagator"));
        columns.push(values);
        for v in traced(bundle) {
            let trace = v.trace.as_ref().expect("filtered");
            header.push(format!("{obs}_{}", v.label));
            docs.push(format!("{obs}_{} = <{obs}> from variant {} ({:?})", v.label, v.label, v.algorithm).to_lowercase());
            columns.push(&trace.observables[k].1);
        }
    }
    let rows = (0..reference.times.len()).map(|i| {
        let mut row = vec![reference.times[i]];
        row.extend(columns.iter().map(|c| c[i]));
        row
    });
    vec![Rendered { name: "series.csv".into(), contents: csv(&docs.join("; "), &header, rows) }]
}

fn training_file(label: &str, part: &str, what: &str, r: &TrainingRecord) -> Rendered {
    let mut best = f64::INFINITY;
    let rows = r.history.iter().enumerate().map(|(i, &c)| {
        best = best.min(c);
        vec![i as f64, c, best]
    });
    let comment = format!("iteration = accepted optimizer step, 0 is the start point; cost = {what}; best_cost = running minimum of cost");
    let header = ["iteration", "cost", "best_cost"].map(String::from);
    Rendered { name: format!("training_{label}_{part}.csv"), contents: csv(&comment, &header, rows) }
}

fn training(bundle: &ResultBundle) -> Vec<Rendered> {
    let mut out = Vec::new();
    for v in &bundle.variants {
        if let Some(r) = &v.ancilla {
            out.push(training_file(&v.label, "ancilla", "state preparation cost F", r));
        }
        if let Some(r) = &v.select {
            out.push(training_file(&v.label, "select", "Hilbert-Schmidt cost G", r));
        }
    }
    out
}

fn probabilities(bundle: &ResultBundle) -> Vec<Rendered> {
    traced(bundle)
        .map(|v| {
            let t = v.trace.as_ref().expect("filtered");
            let rows = (0..t.times.len()).map(|i| vec![i as f64, t.times[i], t.step_probs[i], t.cumulative_prob[i]]);
            let comment = "step = step index, 0 is the initial state; t = time; p_step = success probability of this step; \
                           p_cumulative = product of p_step up to this step";
            let header = ["step", "t", "p_step", "p_cumulative"].map(String::from);
            Rendered { name: format!("probabilities_{}.csv", v.label), contents: csv(comment, &header, rows) }
        })
        .collect()
}

fn complexity(bundle: &ResultBundle) -> Vec<Rendered> {
    let vqa = bundle.config.vqa_samples;
    let vs: Vec<_> = traced(bundle).collect();
    let mut header = vec!["steps".to_string(), "samples_vqa".to_string()];
    let mut docs = vec!["steps = number of time steps".to_string(), format!("samples_vqa = {vqa} samples of a variational baseline")];
    for v in &vs {
        let name = if vs.len() == 1 { "samples_ours".to_string() } else { format!("samples_ours_{}", v.label) };
        docs.push(format!("{name} = 1/P_suc of variant {}", v.label));
        header.push(name);
    }
    let Some(n) = vs.first().map(|v| v.trace.as_ref().expect("filtered").times.len()) else {
        return Vec::new();
    };
    let rows = (1..n).map(|k| {
        let mut row = vec![k as f64, vqa];
        row.extend(vs.iter().map(|v| 1.0 / v.trace.as_ref().expect("filtered").cumulative_prob[k]));
        row
    });
    vec![Rendered { name: "complexity.csv".into(), contents: csv(&docs.join("; "), &header, rows) }]
}

/// Render one named series group.
pub fn emit_plot_data(bundle: &ResultBundle, which: &str) -> Result<Vec<Rendered>, OutputError> {
    match which {
        "series" => Ok(series(bundle)),
        "training" => Ok(training(bundle)),
        "probabilities" => Ok(probabilities(bundle)),
        "complexity" => Ok(complexity(bundle)),
        other => Err(OutputError::UnknownSeries(other.to_string())),
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    name: &'a str,
    version: &'a str,
    status: Status<'a>,
    files: Vec<String>,
    num_ancillas: usize,
    step_weights: &'a [f64],
    variants: Vec<VariantSummary<'a>>,
    config: &'a ExperimentConfig,
}

#[derive(Debug, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
enum Status<'a> {
    Ok,
    Failed { stage: &'a str, error: String },
}

#[derive(Debug, Serialize)]
struct VariantSummary<'a> {
    label: &'a str,
    algorithm: Algorithm,
    ancilla_cost: Option<f64>,
    ancilla_fidelity: Option<f64>,
    select_cost: Option<f64>,
    select_average_fidelity: Option<f64>,
    final_success_probability: Option<f64>,
    /// First step where `1/P_suc` exceeds the baseline sample count.
    crossing_step: Option<usize>,
    max_imag_residue: Option<f64>,
}

/// Write the configured series and `manifest.json` into `dir`. A failure
/// (`Some((stage, message))`) is recorded in the manifest.
pub fn write_outputs(bundle: &ResultBundle, dir: &Path, failure: Option<(&str, String)>) -> Result<Vec<String>, OutputError> {
    fs::create_dir_all(dir).map_err(|e| OutputError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for which in &bundle.config.outputs {
        for r in emit_plot_data(bundle, which)? {
            let path = dir.join(&r.name);
            fs::write(&path, &r.contents).map_err(|e| OutputError::Io(format!("{}: {e}", path.display())))?;
            files.push(r.name);
        }
    }
    let vqa = bundle.config.vqa_samples;
    let variants = bundle
        .variants
        .iter()
        .map(|v| VariantSummary {
            label: &v.label,
            algorithm: v.algorithm,
            ancilla_cost: v.ancilla.as_ref().map(|r| r.final_cost),
            ancilla_fidelity: v.ancilla_fidelity,
            select_cost: v.select.as_ref().map(|r| r.final_cost),
            select_average_fidelity: v.select.as_ref().map(|r| r.fidelity),
            final_success_probability: v.trace.as_ref().and_then(|t| t.cumulative_prob.last().copied()),
            crossing_step: v.trace.as_ref().and_then(|t| t.cumulative_prob.iter().position(|p| 1.0 / p > vqa)),
            max_imag_residue: v.trace.as_ref().map(|t| t.max_imag_residue),
        })
        .collect();
    let status = match &failure {
        None => Status::Ok,
        Some((stage, error)) => Status::Failed { stage, error: error.clone() },
    };
    let manifest = Manifest {
        name: &bundle.config.name,
        version: env!("CARGO_PKG_VERSION"),
        status,
        files: files.clone(),
        num_ancillas: bundle.num_ancillas,
        step_weights: &bundle.step_weights,
        variants,
        config: &bundle.config,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(|e| OutputError::Io(format!("{}: {e}", path.display())))?;
    files.push("manifest.json".into());
    Ok(files)
}
