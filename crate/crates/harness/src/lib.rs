//! Scenario harness around [`multisine_core`]: TOML scenario files,
//! CSV traces and trajectories, run metadata and the built-in scenarios.

use std::path::PathBuf;

use multisine_core::pipeline::PipelineError;
use multisine_core::validation::Violation;

pub mod config;
pub mod run;
pub mod scenarios;
pub mod trace;

pub use config::{validate_config, ScenarioConfig, ScenarioFile};
pub use run::{estimate_from_file, estimate_from_trace, run_scenario, write_outputs, RunOutput};

/// Process exit statuses of the CLI.
pub mod exit {
    pub const OK: u8 = 0;
    /// Unreadable files and other environment failures.
    pub const IO: u8 = 1;
    pub const CONFIG_INVALID: u8 = 2;
    pub const NUMERIC_FAULT: u8 = 3;
    /// The run finished without a held finite-time estimate.
    pub const INSUFFICIENT_EXCITATION: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration:{}", list(.0))]
    Config(Vec<Violation>),
    #[error("input row {row}: {reason}")]
    Input { row: usize, reason: String },
    #[error("numeric fault: {0}")]
    Numeric(#[source] PipelineError),
    #[error("unknown scenario `{0}` (known: {names})", names = scenarios::NAMES.join(", "))]
    UnknownScenario(String),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("\n  {x}")).collect()
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } => exit::IO,
            Self::Parse { .. } | Self::Config(_) | Self::Input { .. } | Self::UnknownScenario(_) => {
                exit::CONFIG_INVALID
            }
            Self::Numeric(_) => exit::NUMERIC_FAULT,
        }
    }
}
