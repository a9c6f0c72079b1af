//! Delay-line parameterization of a sum of `n` sinusoids.
//!
//! With `Z` the `h`-second delay and `c_i = cos(omega_i h)`, every harmonic
//! is annihilated by `Z^2 + 1 - 2 c_i Z`. Expanding the product of the `n`
//! factors gives
//!
//! ```text
//! [Z^2 + 1]^n y = sum_k theta_k * (2Z)^k [Z^2 + 1]^(n-k) y,
//! theta_k = (-1)^(k+1) e_k(c_1, ..., c_n)
//! ```
//!
//! so `psi = [Z^2 + 1]^n y` and `phi_k = (2Z)^k [Z^2 + 1]^(n-k) y` satisfy
//! `psi = phi^T theta` exactly once `2 n h` seconds of history exist.
//! This module uses that single sign convention everywhere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use crate::grid::grid_steps;
use crate::tapped_delay::TappedDelayLine;
use crate::validation::Violation;

/// Tag written to run metadata to identify the sign convention.
pub const SIGN_CONVENTION: &str = "psi=[Z^2+1]^n y; theta_k=(-1)^(k+1) e_k(cos(omega_i h))";

/// Largest harmonic count handled by the pipeline.
pub const MAX_HARMONICS: usize = 8;

/// Largest `n` for which [`binomial`] is evaluated.
pub const MAX_BINOMIAL_N: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    BinomialRange { n: u32, i: u32 },
    RepeatedFrequency(f64),
    NonFiniteFrequency(f64),
    NoFrequencies,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BinomialRange { n, i } => write!(
                f,
                "binomial({n}, {i}) outside 0 <= i <= n <= {MAX_BINOMIAL_N}"
            ),
            Self::RepeatedFrequency(w) => write!(f, "frequency {w} is repeated"),
            Self::NonFiniteFrequency(w) => write!(f, "frequency {w} is not finite"),
            Self::NoFrequencies => f.write_str("at least one frequency is required"),
        }
    }
}

impl core::error::Error for ParamError {}

/// Exact `n! / (i! (n - i)!)`.
pub fn binomial(n: u32, i: u32) -> Result<u64, ParamError> {
    if i > n || n > MAX_BINOMIAL_N {
        return Err(ParamError::BinomialRange { n, i });
    }
    let i = u64::from(i.min(n - i));
    let n = u64::from(n);
    // c * (n - j) is always divisible by (j + 1)
    Ok((0..i).fold(1u64, |c, j| c * (n - j) / (j + 1)))
}

/// Which upper bound on `h` the configuration has to respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayBound {
    /// `h < pi / (2 omega_max)`: every `c_i` is positive.
    #[default]
    QuarterPeriod,
    /// `h < pi / omega_max`: `arccos` is still injective on the band.
    HalfPeriod,
}

impl DelayBound {
    pub fn limit(self, omega_max: f64) -> f64 {
        match self {
            Self::QuarterPeriod => FRAC_PI_2 / omega_max,
            Self::HalfPeriod => PI / omega_max,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::QuarterPeriod => "quarter-period",
            Self::HalfPeriod => "half-period",
        }
    }
}

/// Harmonic count, parameterization delay and frequency band.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    pub h: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub delay_bound: DelayBound,
}

impl ModelConfig {
    pub fn new(n: usize, h: f64, omega_min: f64, omega_max: f64) -> Self {
        Self {
            n,
            h,
            omega_min,
            omega_max,
            delay_bound: DelayBound::QuarterPeriod,
        }
    }

    /// Every violated constraint, given the sampling period.
    pub fn violations(&self, sample_period: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 || self.n > MAX_HARMONICS {
            out.push(Violation::new(
                "model.n",
                format!("must be in 1..={MAX_HARMONICS}"),
                self.n as f64,
            ));
        }
        let band_ok = self.omega_min.is_finite()
            && self.omega_max.is_finite()
            && self.omega_min > 0.0
            && self.omega_min < self.omega_max;
        if !band_ok {
            out.push(Violation::new(
                "model.omega_min",
                "must satisfy 0 < omega_min < omega_max",
                self.omega_min,
            ));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            out.push(Violation::new("model.h", "must be > 0", self.h));
            return out;
        }
        if band_ok {
            let limit = self.delay_bound.limit(self.omega_max);
            if self.h >= limit {
                out.push(Violation::new(
                    "model.h",
                    format!(
                        "must be < {limit} ({} bound for omega_max = {})",
                        self.delay_bound.name(),
                        self.omega_max
                    ),
                    self.h,
                ));
            }
        }
        if grid_steps(self.h, sample_period).is_err() {
            out.push(Violation::new(
                "model.h",
                format!("must be an integer multiple of sample_period = {sample_period}"),
                self.h,
            ));
        }
        out
    }

    /// `omega_max * h`; recovery gets ill-conditioned as this nears `pi/2`
    /// under the quarter-period bound.
    pub fn conditioning_product(&self) -> f64 {
        self.omega_max * self.h
    }
}

/// One sample of the `n`-th order regression `psi = phi^T theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    pub time: f64,
    pub psi: f64,
    pub phi: Vec<f64>,
    /// All contributing taps read real history (`t >= 2 n h`).
    pub valid: bool,
}

/// Parameter vector `theta_1..theta_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Weighted taps realizing `psi` and each `phi_k` for a fixed `n` and `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    n: usize,
    h_steps: usize,
    psi_taps: Vec<(usize, f64)>,
    phi_taps: Vec<Vec<(usize, f64)>>,
}

impl Regressor {
    /// `n` harmonics with a delay of `h_steps` samples.
    pub fn new(n: usize, h_steps: usize) -> Self {
        assert!(
            (1..=MAX_HARMONICS).contains(&n) && h_steps > 0,
            "regressor needs 1 <= n <= {MAX_HARMONICS} and h_steps > 0"
        );
        let nn = n as u32;
        let weight = |n, i| binomial(n, i).expect("n <= MAX_HARMONICS") as f64;
        let psi_taps = (0..=nn)
            .map(|i| (2 * h_steps * (n - i as usize), weight(nn, i)))
            .collect();
        let phi_taps = (1..=n)
            .map(|k| {
                let m = (n - k) as u32;
                let scale = (1u64 << k) as f64;
                (0..=m)
                    .map(|i| {
                        let lag = h_steps * (2 * (m - i) as usize + k);
                        (lag, scale * weight(m, i))
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            h_steps,
            psi_taps,
            phi_taps,
        }
    }

    pub fn from_config(cfg: &ModelConfig, sample_period: f64) -> Result<Self, Violation> {
        let steps = grid_steps(cfg.h, sample_period).map_err(|e| {
            Violation::new("model.h", format!("{e}"), cfg.h)
        })?;
        Ok(Self::new(cfg.n, steps))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_steps(&self) -> usize {
        self.h_steps
    }

    /// Deepest tap read, `2 n h` in samples.
    pub fn depth(&self) -> usize {
        2 * self.n * self.h_steps
    }

    /// `(lag, weight)` pairs of `psi`.
    pub fn psi_taps(&self) -> &[(usize, f64)] {
        &self.psi_taps
    }

    /// `(lag, weight)` pairs of `phi_k`, `k` counted from 1.
    pub fn phi_taps(&self, k: usize) -> &[(usize, f64)] {
        &self.phi_taps[k - 1]
    }

    fn weighted(line: &TappedDelayLine, taps: &[(usize, f64)]) -> f64 {
        taps.iter().map(|&(lag, w)| w * line.at(lag)).sum()
    }

    fn check(&self, line: &TappedDelayLine) {
        assert!(
            line.capacity() >= self.depth(),
            "delay line capacity {} below regressor depth {}",
            line.capacity(),
            self.depth()
        );
    }

    /// Regressand `psi(t) = sum_i C(n, i) y(t - 2h(n - i))`.
    pub fn compute_psi(&self, line: &TappedDelayLine) -> f64 {
        self.check(line);
        Self::weighted(line, &self.psi_taps)
    }

    /// Regressor components `phi_1..phi_n` written into `out`.
    pub fn compute_phi_into(&self, line: &TappedDelayLine, out: &mut [f64]) {
        self.check(line);
        assert_eq!(out.len(), self.n);
        for (slot, taps) in out.iter_mut().zip(&self.phi_taps) {
            *slot = Self::weighted(line, taps);
        }
    }

    pub fn compute_phi(&self, line: &TappedDelayLine) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.compute_phi_into(line, &mut out);
        out
    }

    /// Full regression sample at `time` from a line holding the measurement.
    pub fn sample(&self, line: &TappedDelayLine, time: f64) -> RegressionSample {
        RegressionSample {
            time,
            psi: self.compute_psi(line),
            phi: self.compute_phi(line),
            valid: line.count() > self.depth() as u64,
        }
    }
}

/// `theta` from cosines `c_i`: `theta_k = (-1)^(k+1) e_k(c)`.
pub fn theta_from_cosines(cosines: &[f64]) -> ParameterVector {
    // coefficients of prod (x - c_i), highest power first
    let mut poly = vec![1.0];
    for &c in cosines {
        poly.push(0.0);
        for j in (1..poly.len()).rev() {
            poly[j] -= c * poly[j - 1];
        }
    }
    ParameterVector(poly[1..].iter().map(|a| -a).collect())
}

/// Ground-truth parameter vector for known frequencies and delay `h`.
pub fn true_theta(frequencies: &[f64], h: f64) -> Result<ParameterVector, ParamError> {
    if frequencies.is_empty() {
        return Err(ParamError::NoFrequencies);
    }
    for (i, &w) in frequencies.iter().enumerate() {
        if !w.is_finite() {
            return Err(ParamError::NonFiniteFrequency(w));
        }
        if frequencies[..i].contains(&w) {
            return Err(ParamError::RepeatedFrequency(w));
        }
    }
    let mut cosines: Vec<f64> = frequencies.iter().map(|&w| libm::cos(w * h)).collect();
    // fixed expansion order: permuted inputs give bit-identical output
    cosines.sort_by(f64::total_cmp);
    Ok(theta_from_cosines(&cosines))
}
