//! The `simulate` binary: exit codes, output files and reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oqsim-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL: &str = r#"{
  "name": "small",
  "model": {"name": "amplitude_damping", "delta": 1, "omega": 1, "gamma": 1},
  "step": "eight_term", "dt": 0.01, "total_time": 0.1, "steps": 10, "initial_state": "0",
  "observables": ["sx", "sz"], "seed": 5,
  "variants": [{"label": "alg3", "algorithm": "alg3"},
               {"label": "deg", "algorithm": "alg3", "ancilla": {"kind": "degraded", "fidelity": 0.99}}]
}"#;

#[test]
fn run_writes_documented_files() {
    let dir = scratch("run");
    let cfg = dir.join("small.json");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.join("out");
    let status = bin().args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    for f in ["series.csv", "probabilities_alg3.csv", "probabilities_deg.csv", "complexity.csv", "manifest.json"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        if f.ends_with(".csv") {
            assert!(text.starts_with("# "), "{f} lacks a column comment");
        }
    }
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(series.lines().nth(1).unwrap(), "t,sx_exact,sx_alg3,sx_deg,sz_exact,sz_alg3,sz_deg");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"]["state"], "ok");
    assert_eq!(manifest["config"]["seed"], 5);
}

#[test]
fn reruns_are_byte_identical_and_seed_overrides() {
    let dir = scratch("repro");
    let cfg = dir.join("small.json");
    fs::write(&cfg, SMALL).unwrap();
    let run = |out: &str, seed: Option<&str>| {
        let out = dir.join(out);
        let mut c = bin();
        c.args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        assert_eq!(c.status().unwrap().code(), Some(0));
        fs::read_to_string(out.join("series.csv")).unwrap() + &fs::read_to_string(out.join("manifest.json")).unwrap()
    };
    let a = run("a", None);
    assert_eq!(a, run("b", None));
    let c = run("c", Some("6"));
    assert_ne!(a, c);
    assert!(c.contains("\"seed\": 6"));
}

#[test]
fn config_errors_exit_one() {
    let dir = scratch("bad");
    let cfg = dir.join("bad.json");
    fs::write(&cfg, SMALL.replace("\"steps\": 10", "\"steps\": 11")).unwrap();
    assert_eq!(bin().args(["run", cfg.to_str().unwrap()]).status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["run", dir.join("missing.json").to_str().unwrap()]).status().unwrap().code(), Some(1));
}

#[test]
fn numerical_failure_exits_two_with_partial_manifest() {
    let dir = scratch("numerical");
    let cfg = dir.join("blowup.json");
    fs::write(&cfg, SMALL.replace("\"gamma\": 1", "\"gamma\": 300")).unwrap();
    let out = dir.join("out");
    let status = bin().args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"]["state"], "failed");
    assert_eq!(manifest["status"]["stage"], "step");
}

#[test]
fn presets_are_listed() {
    let out = bin().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for p in ["fig5a", "fig5b", "fig5cd", "fig5ef", "fig5g", "fig5h", "fig5i"] {
        assert!(text.contains(p), "{p} missing");
    }
}

#[test]
fn verify_runs_selected_criteria() {
    let out = bin().args(["verify", "--only", "1,10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    assert_eq!(bin().args(["verify", "--only", "11"]).status().unwrap().code(), Some(1));
}
