//! Command line front end: run scenarios, validate documents, list the
//! built-ins and drive the canned experiments.
//!
//! Exit codes: 0 success, 2 bad input (unknown scenario, failed
//! validation), 3 runtime failure (simulation or artifact writing).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing::info;
use uavsim_core::scenario::experiments::{run_experiment, ExperimentKind};
use uavsim_core::scenario::{
    builtin_names, load_builtin, load_from_path, run_scenario, write_artifacts, LoadedScenario,
    ScenarioError,
};

#[derive(Parser)]
#[command(
    name = "sim",
    version,
    about = "Discrete-event simulator for UAV traffic over a sliced 5G cell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to its horizon and print the summary JSON.
    Run {
        /// Scenario file path, or a built-in name when no such file exists.
        scenario: String,
        /// Directory receiving metrics.csv, summary.json and si_log.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the document's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the document's horizon in seconds.
        #[arg(long)]
        horizon_s: Option<f64>,
    },
    /// Check a scenario document and report every problem found.
    Validate {
        /// Scenario file path, or a built-in name when no such file exists.
        scenario: String,
    },
    /// List the built-in scenarios.
    Scenarios,
    /// Run a canned comparison over several built-in scenarios.
    Experiment {
        /// One of: slicing, placement, split.
        kind: String,
        /// Directory receiving per-case artifacts and comparison.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_BAD_INPUT: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn load(scenario: &str) -> Result<LoadedScenario, ScenarioError> {
    let path = Path::new(scenario);
    if path.exists() {
        load_from_path(path)
    } else {
        load_builtin(scenario)
    }
}

fn fail(code: u8, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn cmd_run(
    scenario: &str,
    out: Option<&Path>,
    seed: Option<u64>,
    horizon_s: Option<f64>,
) -> ExitCode {
    let mut loaded = match load(scenario) {
        Ok(l) => l,
        Err(err) => return fail(EXIT_BAD_INPUT, err),
    };
    if let Some(seed) = seed {
        loaded.doc.seed = seed;
    }
    if let Some(horizon_s) = horizon_s {
        loaded.doc.horizon_s = horizon_s;
    }
    let problems = loaded.validate();
    if !problems.is_empty() {
        return fail(EXIT_BAD_INPUT, ScenarioError::Invalid(problems));
    }
    info!(scenario = %loaded.doc.name, seed = loaded.doc.seed, "running");
    let artifacts = match run_scenario(&loaded) {
        Ok(a) => a,
        Err(err) => return fail(EXIT_RUNTIME, err),
    };
    if let Some(dir) = out {
        if let Err(err) = write_artifacts(dir, &artifacts) {
            return fail(EXIT_RUNTIME, format_args!("cannot write {}: {err}", dir.display()));
        }
        info!(dir = %dir.display(), "artifacts written");
    }
    println!("{}", artifacts.summary_json.trim_end());
    ExitCode::SUCCESS
}

fn cmd_validate(scenario: &str) -> ExitCode {
    let loaded = match load(scenario) {
        Ok(l) => l,
        Err(err) => return fail(EXIT_BAD_INPUT, err),
    };
    let problems = loaded.validate();
    if problems.is_empty() {
        println!(
            "ok: {} ({} flows, horizon {} s)",
            loaded.doc.name,
            loaded.doc.flows.len(),
            loaded.doc.horizon_s
        );
        return ExitCode::SUCCESS;
    }
    eprintln!("{} problem(s) in {}:", problems.len(), loaded.doc.name);
    for problem in &problems {
        eprintln!("  {problem}");
    }
    ExitCode::from(EXIT_BAD_INPUT)
}

fn cmd_experiment(kind: &str, out: Option<&Path>) -> ExitCode {
    let kind: ExperimentKind = match kind.parse() {
        Ok(k) => k,
        Err(err) => return fail(EXIT_BAD_INPUT, err),
    };
    let report = match run_experiment(kind) {
        Ok(r) => r,
        Err(err) => return fail(EXIT_RUNTIME, err),
    };
    if let Some(dir) = out {
        let write = || -> std::io::Result<()> {
            for case in &report.cases {
                write_artifacts(&dir.join(case.label), &case.artifacts)?;
            }
            let mut comparison = serde_json::to_string_pretty(&report.comparison)
                .expect("comparison is plain JSON");
            comparison.push('\n');
            std::fs::write(dir.join("comparison.json"), comparison)
        };
        if let Err(err) = write() {
            return fail(EXIT_RUNTIME, format_args!("cannot write {}: {err}", dir.display()));
        }
        info!(dir = %dir.display(), cases = report.cases.len(), "artifacts written");
    }
    print!("{}", report.table);
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let filter = tracing_subscriber::EnvFilter::try_from_env("SIM_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Command::Run {
            scenario,
            out,
            seed,
            horizon_s,
        } => cmd_run(&scenario, out.as_deref(), seed, horizon_s),
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Scenarios => {
            for name in builtin_names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Experiment { kind, out } => cmd_experiment(&kind, out.as_deref()),
    }
}
