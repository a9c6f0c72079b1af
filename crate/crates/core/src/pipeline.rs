//! Per-sample driver chaining every stage of the estimator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::drem::{mix, Extender};
use crate::estimation::{EstimationError, EstimatorConfig, EstimatorState};
use crate::grid::grid_steps;
use crate::parameterization::{ModelConfig, Regressor};
use crate::recovery::{recover, RecoveryConfig, DEFAULT_IMAG_TOL};
use crate::tapped_delay::TappedDelayLine;
use crate::validation::Violation;

/// Everything needed to run one estimation session.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub sample_period: f64,
    pub model: ModelConfig,
    /// DREM extension delay, seconds.
    pub d: f64,
    /// DREM normalization gain.
    pub epsilon: f64,
    pub estimator: EstimatorConfig,
    pub imag_tol: f64,
    /// Instants at which the finite-time estimator restarts.
    pub reset_times: Vec<f64>,
}

impl PipelineConfig {
    /// Two harmonics, `h = 0.1`, `d = 0.13`, `eps = 100`, `gamma = 0.005`,
    /// `omega_hat(0) = [2, 5]`, `t_ft = 5 s`, 1 ms sampling.
    pub fn published_two_harmonic() -> Self {
        let h = 0.1;
        Self {
            sample_period: 0.001,
            model: ModelConfig::new(2, h, 0.5, 10.0),
            d: 0.13,
            epsilon: 100.0,
            estimator: EstimatorConfig::from_initial_frequencies(&[2.0, 5.0], h, vec![0.005; 2], 5.0),
            imag_tol: DEFAULT_IMAG_TOL,
            reset_times: Vec::new(),
        }
    }

    /// Samples from the start until every tap reads real history.
    pub fn warm_up_samples(&self) -> Option<usize> {
        let h = grid_steps(self.model.h, self.sample_period).ok()?;
        let d = grid_steps(self.d, self.sample_period).ok()?;
        Some(2 * self.model.n * h + self.model.n * d)
    }

    /// Every violated constraint, reported together.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ts = self.sample_period;
        if !(ts.is_finite() && ts > 0.0) {
            out.push(Violation::new("run.sample_period", "must be > 0", ts));
            return out;
        }
        out.extend(self.model.violations(ts));
        let n = self.model.n;
        if grid_steps(self.d, ts).is_err() {
            out.push(Violation::new(
                "drem.d",
                format!("must be a positive integer multiple of sample_period = {ts}"),
                self.d,
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            out.push(Violation::new("drem.epsilon", "must be > 0", self.epsilon));
        }
        let est = &self.estimator;
        if est.gamma.len() != n {
            out.push(Violation::new(
                "estimator.gamma",
                format!("needs exactly n = {n} entries"),
                est.gamma.len() as f64,
            ));
        }
        for &g in &est.gamma {
            if !(g.is_finite() && g > 0.0) {
                out.push(Violation::new("estimator.gamma", "every gain must be > 0", g));
            }
        }
        if est.theta0.len() != n {
            out.push(Violation::new(
                "estimator.omega0",
                format!("needs exactly n = {n} entries"),
                est.theta0.len() as f64,
            ));
        } else if est.theta0.0.iter().any(|v| !v.is_finite()) {
            out.push(Violation::new("estimator.omega0", "must be finite", f64::NAN));
        }
        let bound = n as f64 * (self.model.h + self.d);
        if !(est.t_ft.is_finite() && est.t_ft > bound) {
            out.push(Violation::new(
                "estimator.t_ft",
                format!("must be > n (h + d) = {bound}"),
                est.t_ft,
            ));
        }
        if !(est.w_floor > 0.0 && est.w_floor < 1.0) {
            out.push(Violation::new("estimator.w_floor", "must lie in (0, 1)", est.w_floor));
        }
        if !(self.imag_tol.is_finite() && self.imag_tol > 0.0) {
            out.push(Violation::new("recovery.imag_tol", "must be > 0", self.imag_tol));
        }
        for (i, &r) in self.reset_times.iter().enumerate() {
            let ordered = i == 0 || r > self.reset_times[i - 1];
            if !(r.is_finite() && r > 0.0 && ordered) {
                out.push(Violation::new(
                    "run.reset_times",
                    "must be positive and strictly increasing",
                    r,
                ));
            }
        }
        out
    }

    fn recovery(&self) -> RecoveryConfig {
        RecoveryConfig {
            h: self.model.h,
            omega_min: self.model.omega_min,
            omega_max: self.model.omega_max,
            imag_tol: self.imag_tol,
        }
    }
}

/// One row of the estimation trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub y: f64,
    pub delta: f64,
    pub theta_hat: Vec<f64>,
    pub theta_ft: Option<Vec<f64>>,
    pub omega_grad: Option<Vec<f64>>,
    pub omega_ft: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    Config(Vec<Violation>),
    NonFiniteSample { index: u64, value: f64 },
    Estimation { index: u64, source: EstimationError },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(v) => {
                f.write_str("invalid configuration:")?;
                for item in v {
                    write!(f, "\n  {item}")?;
                }
                Ok(())
            }
            Self::NonFiniteSample { index, value } => {
                write!(f, "sample {index}: non-finite measurement {value}")
            }
            Self::Estimation { index, source } => write!(f, "sample {index}: {source}"),
        }
    }
}

impl core::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Self::Estimation { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Counters collected over a session.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionStats {
    pub samples: u64,
    /// Time of each successful finite-time extraction.
    pub extractions: Vec<f64>,
    pub grad_recovery_failures: u64,
    pub ft_recovery_failures: u64,
    pub clamped_roots: u64,
    pub max_step_gain: f64,
    /// Over warm samples only.
    pub max_abs_delta: f64,
}

/// Pending restart of the finite-time estimator.
#[derive(Debug, Clone, Copy)]
struct Rewarm {
    epoch: f64,
    until_index: u64,
}

/// Streaming estimator: push one measurement, get one record.
#[derive(Debug, Clone)]
pub struct Session {
    cfg: PipelineConfig,
    recovery: RecoveryConfig,
    regressor: Regressor,
    line: TappedDelayLine,
    extender: Extender,
    state: EstimatorState,
    latency: u64,
    index: u64,
    next_reset: usize,
    rewarm: Option<Rewarm>,
    omega_ft: Option<Vec<f64>>,
    stats: SessionStats,
}

impl Session {
    pub fn new(cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        let violations = cfg.violations();
        if !violations.is_empty() {
            return Err(PipelineError::Config(violations));
        }
        let ts = cfg.sample_period;
        let regressor = Regressor::from_config(&cfg.model, ts)
            .map_err(|v| PipelineError::Config(vec![v]))?;
        let d_steps = grid_steps(cfg.d, ts).map_err(|e| {
            PipelineError::Config(vec![Violation::new("drem.d", format!("{e}"), cfg.d)])
        })?;
        let latency = cfg.warm_up_samples().unwrap_or(0) as u64;
        Ok(Self {
            recovery: cfg.recovery(),
            line: TappedDelayLine::new(regressor.depth()),
            extender: Extender::new(cfg.model.n, d_steps),
            regressor,
            state: EstimatorState::new(&cfg.estimator),
            latency,
            index: 0,
            next_reset: 0,
            rewarm: None,
            omega_ft: None,
            stats: SessionStats::default(),
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn state(&self) -> &EstimatorState {
        &self.state
    }

    pub fn stats(&self) -> &SessionStats {
        &self.stats
    }

    /// Time of the next sample to be pushed.
    pub fn time(&self) -> f64 {
        self.index as f64 * self.cfg.sample_period
    }

    fn due(&self, t: f64, at: f64) -> bool {
        t >= at - 1e-9 * at.abs().max(1.0)
    }

    /// Feeds the measurement at the next grid instant.
    pub fn step(&mut self, y: f64) -> Result<TrajectoryRecord, PipelineError> {
        let index = self.index;
        let t = self.time();
        if !y.is_finite() {
            return Err(PipelineError::NonFiniteSample { index, value: y });
        }

        // a reset drops the held estimate at once and restarts the epoch
        // once the delay lines hold only post-reset samples
        if let Some(&at) = self.cfg.reset_times.get(self.next_reset) {
            if self.due(t, at) {
                self.next_reset += 1;
                self.state.clear_finite_time();
                self.omega_ft = None;
                self.rewarm = Some(Rewarm {
                    epoch: at,
                    until_index: index + self.latency,
                });
            }
        }

        self.line.push(y);
        let sample = self.regressor.sample(&self.line, t);
        let mixed = mix(&self.extender.extend(&sample), self.cfg.epsilon);
        if !mixed.is_finite() {
            return Err(PipelineError::Estimation {
                index,
                source: EstimationError::NonFinite { time: t },
            });
        }
        if mixed.warm {
            self.stats.max_abs_delta = self.stats.max_abs_delta.max(mixed.delta.abs());
        }

        match self.rewarm {
            Some(r) if index < r.until_index => {}
            Some(r) => {
                self.state.reset(r.epoch);
                self.rewarm = None;
            }
            None => {}
        }
        if self.rewarm.is_none() {
            self.state
                .step_gradient(&mixed, &self.cfg.estimator, self.cfg.sample_period)
                .map_err(|source| PipelineError::Estimation { index, source })?;
            if self.state.theta_ft().is_none()
                && self.state.finite_time_estimate(&self.cfg.estimator).is_ok()
            {
                self.stats.extractions.push(t);
                let theta_ft = self.state.theta_ft().unwrap_or_default();
                match recover(theta_ft, &self.recovery) {
                    Ok(est) => {
                        self.stats.clamped_roots += u64::from(est.clamped);
                        self.omega_ft = Some(est.omega_hat);
                    }
                    Err(_) => self.stats.ft_recovery_failures += 1,
                }
            }
        }
        self.stats.max_step_gain = self.state.max_step_gain();

        let omega_grad = match recover(self.state.theta_hat(), &self.recovery) {
            Ok(est) => {
                self.stats.clamped_roots += u64::from(est.clamped);
                Some(est.omega_hat)
            }
            Err(_) => {
                self.stats.grad_recovery_failures += 1;
                None
            }
        };

        self.index += 1;
        self.stats.samples = self.index;
        Ok(TrajectoryRecord {
            time: t,
            y,
            delta: mixed.delta,
            theta_hat: self.state.theta_hat().to_vec(),
            theta_ft: self.state.theta_ft().map(<[f64]>::to_vec),
            omega_grad,
            omega_ft: self.omega_ft.clone(),
        })
    }

    /// Runs a whole sampled trace through a fresh session.
    pub fn run(cfg: &PipelineConfig, values: &[f64]) -> Result<(Vec<TrajectoryRecord>, SessionStats), PipelineError> {
        let mut session = Self::new(cfg)?;
        let records = values
            .iter()
            .map(|&y| session.step(y))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((records, session.stats))
    }
}
