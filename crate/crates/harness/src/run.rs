//! Running scenarios and recorded traces through the estimator.

use std::path::{Path, PathBuf};

use multisine_core::parameterization::SIGN_CONVENTION;
use multisine_core::pipeline::{PipelineError, Session, SessionStats, TrajectoryRecord};
use multisine_core::signal::{SampledTrace, NOISE_RNG};
use multisine_core::validation::Violation;
use serde::Serialize;

use crate::config::{ScenarioConfig, ScenarioFile};
use crate::trace;
use crate::HarnessError;

/// Trajectory and bookkeeping of one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub stats: SessionStats,
    /// Accumulated excitation per component at the end of the run.
    pub excitation: Vec<f64>,
    /// The measurement, when it was synthesized rather than read.
    pub trace: Option<SampledTrace>,
}

impl RunOutput {
    /// Whether a finite-time estimate is held at the end of the run.
    pub fn extracted(&self) -> bool {
        self.records.last().is_some_and(|r| r.theta_ft.is_some())
    }

    pub fn last(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }
}

fn drive(cfg: &ScenarioConfig, trace: &SampledTrace) -> Result<RunOutput, HarnessError> {
    let mut session = Session::new(&cfg.pipeline)?;
    let mut records = Vec::with_capacity(trace.values.len());
    for &y in &trace.values {
        let mut r = session.step(y)?;
        r.time += trace.start_time;
        records.push(r);
    }
    Ok(RunOutput {
        records,
        stats: session.stats().clone(),
        excitation: session.state().excitation_level(),
        trace: None,
    })
}

/// Synthesizes the configured signal and estimates its frequencies.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, HarnessError> {
    let mut missing = Vec::new();
    if cfg.signal.is_none() {
        missing.push(Violation::new("signal", "required to simulate", f64::NAN));
    }
    if cfg.duration.is_none() {
        missing.push(Violation::new("run.duration", "required to simulate", f64::NAN));
    }
    let (Some(signal), Some(duration)) = (&cfg.signal, cfg.duration) else {
        return Err(HarnessError::Config(missing));
    };
    let trace = signal
        .generate_trace(cfg.pipeline.sample_period, duration)
        .map_err(|e| HarnessError::Config(vec![Violation::new("signal", e.to_string(), f64::NAN)]))?;
    let mut out = drive(cfg, &trace)?;
    out.trace = Some(trace);
    Ok(out)
}

/// Runs an already sampled measurement; `[signal]` is ignored.
///
/// Times in the output keep the trace's own origin, while reset times
/// count from its first sample.
pub fn estimate_from_trace(cfg: &ScenarioConfig, trace: &SampledTrace) -> Result<RunOutput, HarnessError> {
    drive(cfg, trace)
}

pub fn estimate_from_file(cfg: &ScenarioConfig, path: &Path) -> Result<RunOutput, HarnessError> {
    let trace = trace::read_trace_file(path, cfg.pipeline.sample_period)?;
    estimate_from_trace(cfg, &trace)
}

#[derive(Debug, Serialize)]
struct RunInfo<'a> {
    version: &'a str,
    command: &'a str,
    scenario: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    seed: u64,
    noise_rng: &'a str,
    sign_convention: &'a str,
    samples: u64,
}

#[derive(Debug, Serialize)]
struct StatsInfo<'a> {
    extractions: &'a [f64],
    finite_time_held: bool,
    excitation: &'a [f64],
    max_step_gain: f64,
    max_abs_delta: f64,
    grad_recovery_failures: u64,
    ft_recovery_failures: u64,
    clamped_roots: u64,
}

#[derive(Debug, Serialize)]
struct FinalInfo<'a> {
    time: f64,
    theta_hat: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_ft: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_grad: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_ft: Option<&'a [f64]>,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    warnings: &'a [String],
    run: RunInfo<'a>,
    stats: StatsInfo<'a>,
    #[serde(rename = "final", skip_serializing_if = "Option::is_none")]
    last: Option<FinalInfo<'a>>,
    config: &'a ScenarioFile,
}

/// Key-value run description: provenance, counters, final estimates and
/// the configuration echo.
pub fn metadata(cfg: &ScenarioConfig, out: &RunOutput, command: &str, input: Option<&Path>) -> String {
    let last = out.last().map(|r| FinalInfo {
        time: r.time,
        theta_hat: &r.theta_hat,
        theta_ft: r.theta_ft.as_deref(),
        omega_grad: r.omega_grad.as_deref(),
        omega_ft: r.omega_ft.as_deref(),
    });
    let meta = Metadata {
        warnings: &cfg.warnings,
        run: RunInfo {
            version: env!("CARGO_PKG_VERSION"),
            command,
            scenario: &cfg.file.name,
            input: input.map(|p| p.display().to_string()),
            seed: cfg.seed,
            noise_rng: NOISE_RNG,
            sign_convention: SIGN_CONVENTION,
            samples: out.stats.samples,
        },
        stats: StatsInfo {
            extractions: &out.stats.extractions,
            finite_time_held: out.extracted(),
            excitation: &out.excitation,
            max_step_gain: out.stats.max_step_gain,
            max_abs_delta: out.stats.max_abs_delta,
            grad_recovery_failures: out.stats.grad_recovery_failures,
            ft_recovery_failures: out.stats.ft_recovery_failures,
            clamped_roots: out.stats.clamped_roots,
        },
        last,
        config: &cfg.file,
    };
    toml::to_string(&meta).expect("metadata always serializes")
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenFiles {
    pub trace: Option<PathBuf>,
    pub estimate: PathBuf,
    pub metadata: PathBuf,
}

/// Writes the trajectory, the metadata and, for synthesized runs, the
/// measurement trace into `dir`.
pub fn write_outputs(
    dir: &Path,
    cfg: &ScenarioConfig,
    out: &RunOutput,
    command: &str,
    input: Option<&Path>,
) -> Result<WrittenFiles, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let names = &cfg.file.output;
    let trace_path = match &out.trace {
        Some(t) => {
            let p = dir.join(&names.trace);
            trace::write_trace_file(&p, t)?;
            Some(p)
        }
        None => None,
    };
    let estimate = dir.join(&names.estimate);
    trace::write_trajectory_file(&estimate, cfg.pipeline.model.n, &out.records)?;
    let metadata_path = dir.join(&names.metadata);
    std::fs::write(&metadata_path, metadata(cfg, out, command, input)).map_err(|source| HarnessError::Io {
        path: metadata_path.clone(),
        source,
    })?;
    Ok(WrittenFiles {
        trace: trace_path,
        estimate,
        metadata: metadata_path,
    })
}

impl From<PipelineError> for HarnessError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(v) => HarnessError::Config(v),
            other => HarnessError::Numeric(other),
        }
    }
}
