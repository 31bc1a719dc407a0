//! `simulate`: run experiment configs, list the bundled presets, or run the
//! acceptance suite.
//!
//! Exit status is 0 on success, 1 for a bad config or unwritable output,
//! and 2 when a numerical stage fails or a criterion does not pass.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oqsim::config::{preset, PRESETS};
use oqsim::output::write_outputs;
use oqsim::parallel::{thread_count, THREADS_ENV};
use oqsim::{acceptance, run_experiment_with, ExperimentConfig};

#[derive(Parser)]
#[command(name = "simulate", version, about = "Quantum-assisted simulation of open quantum systems")]
#[command(after_help = "Set OQSIM_THREADS to bound the number of worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config file (or the name of a preset).
    Run {
        config: String,
        /// Output directory [default: out/<name>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the bundled presets.
    ListPresets,
    /// Run the acceptance suite.
    Verify {
        /// Only these criteria (1-10).
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<usize>,
    },
}

const CONFIG_ERROR: u8 = 1;
const NUMERICAL_ERROR: u8 = 2;

fn load(arg: &str) -> Result<ExperimentConfig, oqsim::ConfigError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(cfg) = preset(arg) {
            return Ok(cfg);
        }
    }
    ExperimentConfig::load(path)
}

fn run(config: &str, out: Option<PathBuf>, seed: Option<u64>) -> ExitCode {
    let mut cfg = match load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.unwrap_or_else(|| Path::new("out").join(&cfg.name));
    let threads = thread_count();
    eprintln!("running {} on {threads} thread(s) ({THREADS_ENV})", cfg.name);
    let (bundle, failure) = match run_experiment_with(&cfg, threads) {
        Ok(b) => (b, None),
        Err(e) => {
            eprintln!("error: {e}");
            let msg = e.source.to_string();
            (*e.partial, Some((e.stage, msg)))
        }
    };
    let written = write_outputs(&bundle, &dir, failure.as_ref().map(|(s, m)| (s.as_str(), m.clone())));
    match written {
        Ok(files) => {
            for f in files {
                println!("{}", dir.join(f).display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    }
    if failure.is_some() {
        ExitCode::from(NUMERICAL_ERROR)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed } => run(&config, out, seed),
        Command::ListPresets => {
            for (name, _) in PRESETS {
                let cfg = preset(name).expect("bundled");
                println!("{name:8} {}", cfg.description);
            }
            ExitCode::SUCCESS
        }
        Command::Verify { only } => {
            if let Some(bad) = only.iter().find(|id| !(1..=10).contains(*id)) {
                eprintln!("error: no criterion {bad}");
                return ExitCode::from(CONFIG_ERROR);
            }
            let results = acceptance::run_suite(&only, |r| println!("{r}"));
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(NUMERICAL_ERROR)
            }
        }
    }
}
