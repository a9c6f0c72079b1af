//! Scenario files: TOML with one table per stage.
//!
//! ```toml
//! name = "noiseless-2h"
//!
//! [signal]
//! harmonics = [{ amplitude = 1.0, frequency = 2.0, phase = 0.0 }]
//! disturbance = { kind = "uniform", half_range = 0.2, sample_period = 0.001 }
//!
//! [[signal.schedule]]            # optional, one table per switch
//! time = 30.0
//! harmonics = [{ amplitude = 1.0, frequency = 2.5 }]
//!
//! [model]
//! n = 1
//! h = 0.1
//! omega_min = 0.5
//! omega_max = 10.0
//! delay_bound = "quarter-period" # or "half-period"
//!
//! [drem]
//! d = 0.13
//! epsilon = 100.0
//!
//! [estimator]
//! gamma = [0.005]
//! omega0 = [2.0]
//! t_ft = 5.0
//! w_floor = 1e-6                 # optional
//!
//! [recovery]                     # optional
//! imag_tol = 1e-3
//!
//! [run]
//! sample_period = 0.001
//! duration = 40.0
//! reset_times = []               # optional
//! seed = 0                       # seeds the uniform disturbance
//!
//! [output]                       # optional, relative to the output directory
//! trace = "trace.csv"
//! estimate = "estimate.csv"
//! metadata = "metadata.toml"
//! ```

use std::path::Path;

use multisine_core::estimation::{EstimatorConfig, DEFAULT_W_FLOOR};
use multisine_core::parameterization::{DelayBound, ModelConfig};
use multisine_core::pipeline::PipelineConfig;
use multisine_core::recovery::DEFAULT_IMAG_TOL;
use multisine_core::signal::{DisturbanceSpec, HarmonicSpec, ScheduleEntry, SignalSpec};
use multisine_core::validation::Violation;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Above this `omega_max * h` the cosines approach zero and recovery loses accuracy.
pub const CONDITIONING_WARN_LEVEL: f64 = 1.4;

/// A scenario file exactly as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    /// Only `simulate` needs it; `estimate` reads the measurement from a file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalSection>,
    pub model: ModelSection,
    pub drem: DremSection,
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub recovery: RecoverySection,
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicEntry {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchEntry {
    pub time: f64,
    pub harmonics: Vec<HarmonicEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisturbanceSection {
    #[default]
    None,
    Harmonic {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Uniform { half_range: f64, sample_period: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub harmonics: Vec<HarmonicEntry>,
    #[serde(default)]
    pub disturbance: DisturbanceSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<SwitchEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayBoundName {
    #[default]
    QuarterPeriod,
    HalfPeriod,
}

impl From<DelayBoundName> for DelayBound {
    fn from(b: DelayBoundName) -> Self {
        match b {
            DelayBoundName::QuarterPeriod => DelayBound::QuarterPeriod,
            DelayBoundName::HalfPeriod => DelayBound::HalfPeriod,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    pub h: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    #[serde(default)]
    pub delay_bound: DelayBoundName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DremSection {
    pub d: f64,
    pub epsilon: f64,
}

fn default_w_floor() -> f64 {
    DEFAULT_W_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub gamma: Vec<f64>,
    pub omega0: Vec<f64>,
    pub t_ft: f64,
    #[serde(default = "default_w_floor")]
    pub w_floor: f64,
}

fn default_imag_tol() -> f64 {
    DEFAULT_IMAG_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverySection {
    #[serde(default = "default_imag_tol")]
    pub imag_tol: f64,
}

impl Default for RecoverySection {
    fn default() -> Self {
        Self {
            imag_tol: DEFAULT_IMAG_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub sample_period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default)]
    pub reset_times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub trace: String,
    pub estimate: String,
    pub metadata: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trace: "trace.csv".into(),
            estimate: "estimate.csv".into(),
            metadata: "metadata.toml".into(),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }
}

/// A checked scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub file: ScenarioFile,
    /// `None` when the file has no `[signal]` table.
    pub signal: Option<SignalSpec>,
    pub pipeline: PipelineConfig,
    pub duration: Option<f64>,
    pub seed: u64,
    /// Conditions worth reporting that do not block a run.
    pub warnings: Vec<String>,
}

fn harmonic(entry: &HarmonicEntry) -> Result<HarmonicSpec, String> {
    HarmonicSpec::new(entry.amplitude, entry.frequency, entry.phase).map_err(|e| e.to_string())
}

fn harmonics(field: &str, entries: &[HarmonicEntry], out: &mut Vec<Violation>) -> Vec<HarmonicSpec> {
    let mut specs = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        match harmonic(e) {
            Ok(s) => specs.push(s),
            Err(msg) => out.push(Violation::new(format!("{field}[{i}]"), msg, e.frequency)),
        }
    }
    specs
}

fn check_band(field: &str, entries: &[HarmonicEntry], model: &ModelSection, out: &mut Vec<Violation>) {
    if entries.len() != model.n {
        out.push(Violation::new(
            field,
            format!("needs exactly model.n = {} harmonics", model.n),
            entries.len() as f64,
        ));
    }
    for (i, e) in entries.iter().enumerate() {
        if !(e.frequency > model.omega_min && e.frequency < model.omega_max) {
            out.push(Violation::new(
                format!("{field}[{i}].frequency"),
                format!("must lie in ({}, {})", model.omega_min, model.omega_max),
                e.frequency,
            ));
        }
    }
}

fn build_signal(
    section: &SignalSection,
    model: &ModelSection,
    seed: u64,
    out: &mut Vec<Violation>,
) -> Option<SignalSpec> {
    let before = out.len();
    check_band("signal.harmonics", &section.harmonics, model, out);
    let base = harmonics("signal.harmonics", &section.harmonics, out);
    let mut schedule = Vec::with_capacity(section.schedule.len());
    for (k, sw) in section.schedule.iter().enumerate() {
        let field = format!("signal.schedule[{k}].harmonics");
        check_band(&field, &sw.harmonics, model, out);
        schedule.push(ScheduleEntry {
            time: sw.time,
            harmonics: harmonics(&field, &sw.harmonics, out),
        });
    }
    let disturbance = match section.disturbance {
        DisturbanceSection::None => DisturbanceSpec::None,
        DisturbanceSection::Harmonic {
            amplitude,
            frequency,
            phase,
        } => DisturbanceSpec::Harmonic {
            amplitude,
            frequency,
            phase,
        },
        DisturbanceSection::Uniform {
            half_range,
            sample_period,
        } => DisturbanceSpec::Uniform {
            half_range,
            sample_period,
            seed,
        },
    };
    if out.len() > before {
        return None;
    }
    let built = SignalSpec::new(base)
        .and_then(|s| s.with_disturbance(disturbance))
        .and_then(|s| s.with_schedule(schedule));
    match built {
        Ok(s) => Some(s),
        Err(e) => {
            out.push(Violation::new("signal", e.to_string(), f64::NAN));
            None
        }
    }
}

/// Checks every constraint and reports all violations together.
pub fn validate_config(file: &ScenarioFile) -> Result<ScenarioConfig, Vec<Violation>> {
    let m = &file.model;
    let mut model = ModelConfig::new(m.n, m.h, m.omega_min, m.omega_max);
    model.delay_bound = m.delay_bound.into();
    let mut out = Vec::new();

    // theta0 needs n entries; the pipeline check reports the mismatch
    let estimator = EstimatorConfig {
        w_floor: file.estimator.w_floor,
        ..EstimatorConfig::from_initial_frequencies(
            &file.estimator.omega0,
            m.h,
            file.estimator.gamma.clone(),
            file.estimator.t_ft,
        )
    };
    let pipeline = PipelineConfig {
        sample_period: file.run.sample_period,
        model,
        d: file.drem.d,
        epsilon: file.drem.epsilon,
        estimator,
        imag_tol: file.recovery.imag_tol,
        reset_times: file.run.reset_times.clone(),
    };
    out.extend(pipeline.violations());

    if file.estimator.omega0.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        out.push(Violation::new("estimator.omega0", "every entry must be > 0", f64::NAN));
    }
    if let Some(duration) = file.run.duration {
        let t_ft = file.estimator.t_ft;
        if !(duration.is_finite() && duration > t_ft) {
            out.push(Violation::new(
                "run.duration",
                format!("must exceed estimator.t_ft = {t_ft}"),
                duration,
            ));
        }
        if let Some(&last) = file.run.reset_times.last() {
            if last + t_ft >= duration {
                out.push(Violation::new(
                    "run.reset_times",
                    format!("last reset plus t_ft must fall before run.duration = {duration}"),
                    last,
                ));
            }
        }
    }
    let signal = file
        .signal
        .as_ref()
        .and_then(|s| build_signal(s, m, file.run.seed, &mut out));
    if file.output.trace.is_empty() || file.output.estimate.is_empty() || file.output.metadata.is_empty() {
        out.push(Violation::new("output", "file names must be non-empty", f64::NAN));
    }
    if !out.is_empty() {
        return Err(out);
    }

    let mut warnings = Vec::new();
    let level = m.omega_max * m.h;
    if level > CONDITIONING_WARN_LEVEL {
        warnings.push(format!(
            "model.omega_max * model.h = {level:.3} exceeds {CONDITIONING_WARN_LEVEL}; cos(omega h) nears zero and recovery is ill-conditioned"
        ));
    }
    Ok(ScenarioConfig {
        file: file.clone(),
        signal,
        pipeline,
        duration: file.run.duration,
        seed: file.run.seed,
        warnings,
    })
}
