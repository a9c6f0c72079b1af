//! Multi-sinusoidal measurement model with optional disturbances and
//! step-wise frequency schedules.

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name of the noise generator, recorded in run metadata.
pub const NOISE_RNG: &str = "chacha8 (rand_chacha 0.9), word_pos = 2*k, 53-bit uniform";

#[derive(Debug, Clone, PartialEq)]
pub enum SignalError {
    NonPositiveAmplitude(f64),
    NonPositiveFrequency(f64),
    NonFinite(&'static str),
    Empty,
    RepeatedFrequency(f64),
    UnorderedSchedule { index: usize },
    NonPositiveHalfRange(f64),
    NonPositivePeriod(f64),
}

impl fmt::Display for SignalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveAmplitude(a) => write!(f, "amplitude must be > 0, got {a}"),
            Self::NonPositiveFrequency(w) => write!(f, "frequency must be > 0, got {w}"),
            Self::NonFinite(what) => write!(f, "{what} must be finite"),
            Self::Empty => f.write_str("harmonic list is empty"),
            Self::RepeatedFrequency(w) => write!(f, "frequency {w} appears more than once"),
            Self::UnorderedSchedule { index } => {
                write!(f, "schedule switch times must strictly increase (entry {index})")
            }
            Self::NonPositiveHalfRange(r) => write!(f, "noise half range must be > 0, got {r}"),
            Self::NonPositivePeriod(p) => write!(f, "sample period must be > 0, got {p}"),
        }
    }
}

impl core::error::Error for SignalError {}

/// One term `amplitude * sin(frequency * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicSpec {
    amplitude: f64,
    frequency: f64,
    phase: f64,
}

impl HarmonicSpec {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Result<Self, SignalError> {
        if !amplitude.is_finite() || !frequency.is_finite() || !phase.is_finite() {
            return Err(SignalError::NonFinite("harmonic parameter"));
        }
        if amplitude <= 0.0 {
            return Err(SignalError::NonPositiveAmplitude(amplitude));
        }
        if frequency <= 0.0 {
            return Err(SignalError::NonPositiveFrequency(frequency));
        }
        Ok(Self {
            amplitude,
            frequency,
            phase,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * libm::sin(self.frequency * t + self.phase)
    }
}

/// Additive measurement disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DisturbanceSpec {
    #[default]
    None,
    /// A sinusoid; its frequency may lie outside the estimated band.
    Harmonic {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Uniform noise on `[-half_range, half_range]`, held constant for
    /// `sample_period` seconds after each draw.
    Uniform {
        half_range: f64,
        sample_period: f64,
        seed: u64,
    },
}

impl DisturbanceSpec {
    fn validate(&self) -> Result<(), SignalError> {
        match *self {
            Self::None => Ok(()),
            Self::Harmonic {
                amplitude,
                frequency,
                phase,
            } => {
                if amplitude.is_finite() && frequency.is_finite() && phase.is_finite() {
                    Ok(())
                } else {
                    Err(SignalError::NonFinite("disturbance parameter"))
                }
            }
            Self::Uniform {
                half_range,
                sample_period,
                ..
            } => {
                if !half_range.is_finite() || half_range <= 0.0 {
                    Err(SignalError::NonPositiveHalfRange(half_range))
                } else if !sample_period.is_finite() || sample_period <= 0.0 {
                    Err(SignalError::NonPositivePeriod(sample_period))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Disturbance value at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Harmonic {
                amplitude,
                frequency,
                phase,
            } => amplitude * libm::sin(frequency * t + phase),
            Self::Uniform {
                half_range,
                sample_period,
                seed,
            } => {
                let index = libm::floor(t / sample_period + 1e-9).max(0.0) as u64;
                uniform_draw(seed, index, half_range)
            }
        }
    }
}

/// The `index`-th noise value of the stream identified by `seed`.
///
/// Random access into the ChaCha keystream keeps evaluation a pure function
/// of `(seed, index)`, so traces do not depend on evaluation order.
pub fn uniform_draw(seed: u64, index: u64, half_range: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(u128::from(index) * 2);
    let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    half_range * (2.0 * unit - 1.0)
}

/// A harmonic set that takes over at `time` (inclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub time: f64,
    pub harmonics: Vec<HarmonicSpec>,
}

/// Complete measured-signal description.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    harmonics: Vec<HarmonicSpec>,
    disturbance: DisturbanceSpec,
    schedule: Vec<ScheduleEntry>,
}

fn check_harmonics(set: &[HarmonicSpec]) -> Result<(), SignalError> {
    if set.is_empty() {
        return Err(SignalError::Empty);
    }
    for (i, a) in set.iter().enumerate() {
        if set[..i].iter().any(|b| b.frequency == a.frequency) {
            return Err(SignalError::RepeatedFrequency(a.frequency));
        }
    }
    Ok(())
}

impl SignalSpec {
    pub fn new(harmonics: Vec<HarmonicSpec>) -> Result<Self, SignalError> {
        check_harmonics(&harmonics)?;
        Ok(Self {
            harmonics,
            disturbance: DisturbanceSpec::None,
            schedule: Vec::new(),
        })
    }

    pub fn with_disturbance(mut self, disturbance: DisturbanceSpec) -> Result<Self, SignalError> {
        disturbance.validate()?;
        self.disturbance = disturbance;
        Ok(self)
    }

    pub fn with_schedule(mut self, schedule: Vec<ScheduleEntry>) -> Result<Self, SignalError> {
        for (i, entry) in schedule.iter().enumerate() {
            if !entry.time.is_finite() {
                return Err(SignalError::NonFinite("switch time"));
            }
            if i > 0 && entry.time <= schedule[i - 1].time {
                return Err(SignalError::UnorderedSchedule { index: i });
            }
            check_harmonics(&entry.harmonics)?;
        }
        self.schedule = schedule;
        Ok(self)
    }

    pub fn harmonics(&self) -> &[HarmonicSpec] {
        &self.harmonics
    }

    pub fn disturbance(&self) -> &DisturbanceSpec {
        &self.disturbance
    }

    pub fn schedule(&self) -> &[ScheduleEntry] {
        &self.schedule
    }

    /// Harmonic set in force at `t`; a switch applies from its own instant on.
    pub fn active_harmonics(&self, t: f64) -> &[HarmonicSpec] {
        self.schedule
            .iter()
            .rev()
            .find(|e| t >= e.time - 1e-9 * e.time.abs().max(1.0))
            .map_or(&self.harmonics[..], |e| &e.harmonics[..])
    }

    /// Sum of amplitudes over every harmonic set; bounds the noiseless signal.
    pub fn amplitude_bound(&self) -> f64 {
        let base: f64 = self.harmonics.iter().map(|h| h.amplitude).sum();
        self.schedule
            .iter()
            .map(|e| e.harmonics.iter().map(|h| h.amplitude).sum())
            .fold(base, f64::max)
    }

    /// Noiseless part of the measurement at `t`.
    pub fn clean(&self, t: f64) -> f64 {
        self.active_harmonics(t).iter().map(|h| h.eval(t)).sum()
    }

    /// Measured value at `t >= 0`, disturbance included.
    pub fn sample(&self, t: f64) -> f64 {
        self.clean(t) + self.disturbance.eval(t)
    }

    /// Samples `[0, duration]` on a uniform grid.
    pub fn generate_trace(&self, sample_period: f64, duration: f64) -> Result<SampledTrace, SignalError> {
        if !sample_period.is_finite() || !duration.is_finite() {
            return Err(SignalError::NonFinite("trace parameter"));
        }
        if sample_period <= 0.0 {
            return Err(SignalError::NonPositivePeriod(sample_period));
        }
        if duration < 0.0 {
            return Err(SignalError::NonFinite("duration"));
        }
        let len = libm::floor(duration / sample_period + 1e-9) as usize + 1;
        let values = (0..len).map(|k| self.sample(k as f64 * sample_period)).collect();
        Ok(SampledTrace {
            sample_period,
            start_time: 0.0,
            values,
        })
    }
}

/// Samples on a uniform grid starting at `start_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrace {
    pub sample_period: f64,
    pub start_time: f64,
    pub values: Vec<f64>,
}

impl SampledTrace {
    pub fn time(&self, k: usize) -> f64 {
        self.start_time + k as f64 * self.sample_period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
