use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use multisine::config::{validate_config, ScenarioFile};
use multisine::run::{estimate_from_file, run_scenario, write_outputs, RunOutput};
use multisine::{exit, scenarios, HarnessError, ScenarioConfig};

/// Finite-time frequency estimation of multi-sinusoidal signals.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides `run.seed` (uniform disturbance stream).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving the CSV and metadata files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize the configured signal and estimate its frequencies.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate frequencies of a recorded `time,y` CSV trace.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a built-in scenario.
    Scenario {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(scenarios::NAMES))]
        name: String,
    },
}

fn prepare(mut file: ScenarioFile, seed: Option<u64>) -> Result<ScenarioConfig, HarnessError> {
    if let Some(s) = seed {
        file.run.seed = s;
    }
    let cfg = validate_config(&file).map_err(HarnessError::Config)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn report(cfg: &ScenarioConfig, out: &RunOutput) {
    let fmt = |v: Option<&Vec<f64>>| match v {
        Some(v) => format!("{v:.6?}"),
        None => "-".to_string(),
    };
    if let Some(last) = out.last() {
        println!("t = {:.3} s", last.time);
        println!("omega_grad = {}", fmt(last.omega_grad.as_ref()));
        println!("omega_ft   = {}", fmt(last.omega_ft.as_ref()));
    }
    println!(
        "extractions at {:?} s (t_ft = {} s)",
        out.stats.extractions, cfg.pipeline.estimator.t_ft
    );
}

fn execute(cli: Cli) -> Result<u8, HarnessError> {
    let (cfg, out, command, input) = match &cli.command {
        Command::Simulate { config } => {
            let cfg = prepare(ScenarioFile::load(config)?, cli.seed)?;
            let out = run_scenario(&cfg)?;
            (cfg, out, "simulate", None)
        }
        Command::Estimate { config, input } => {
            let cfg = prepare(ScenarioFile::load(config)?, cli.seed)?;
            let out = estimate_from_file(&cfg, input)?;
            (cfg, out, "estimate", Some(input.as_path()))
        }
        Command::Scenario { name } => {
            let cfg = prepare(scenarios::builtin(name)?, cli.seed)?;
            let out = run_scenario(&cfg)?;
            (cfg, out, "scenario", None)
        }
    };
    let files = write_outputs(&cli.out, &cfg, &out, command, input.map(Path::new))?;
    report(&cfg, &out);
    if let Some(t) = &files.trace {
        println!("trace:    {}", t.display());
    }
    println!("estimate: {}", files.estimate.display());
    println!("metadata: {}", files.metadata.display());
    if out.extracted() {
        Ok(exit::OK)
    } else {
        eprintln!("no finite-time estimate held at end of run: insufficient excitation");
        Ok(exit::INSUFFICIENT_EXCITATION)
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
