//! Regressor extension by repeated `d`-second delays and adjugate mixing.
//!
//! Row `i` of the extended system is the regression delayed `i` times,
//! `psi(t - i d) = phi(t - i d)^T theta`. Multiplying the stacked system by
//! `adj(eps Phi_f)` decouples it into `Psi_j = Delta * theta_j` with
//! `Delta = det(eps Phi_f)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{adjugate_and_determinant, Matrix};
use crate::parameterization::RegressionSample;
use crate::tapped_delay::TappedDelayLine;

/// Stacked regression `Psi_f = Phi_f theta` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedRegression {
    pub time: f64,
    /// `psi(t - i d)`, `i = 1..n`.
    pub psi_f: Vec<f64>,
    /// Row `i - 1` is `phi(t - i d)`.
    pub phi_f: Matrix,
    /// Every row was built from a valid regression sample.
    pub warm: bool,
}

/// Decoupled scalar regressions `Psi_j = Delta * theta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSample {
    pub time: f64,
    pub delta: f64,
    pub psi: Vec<f64>,
    pub warm: bool,
}

impl MixedSample {
    pub fn is_finite(&self) -> bool {
        self.delta.is_finite() && self.psi.iter().all(|v| v.is_finite())
    }
}

/// Delay lines holding `psi` and every `phi_k` for the extension.
#[derive(Debug, Clone)]
pub struct Extender {
    n: usize,
    d_steps: usize,
    psi_line: TappedDelayLine,
    phi_lines: Vec<TappedDelayLine>,
    valid_seen: u64,
}

impl Extender {
    pub fn new(n: usize, d_steps: usize) -> Self {
        assert!(n > 0 && d_steps > 0, "extension needs n > 0 and d_steps > 0");
        let capacity = n * d_steps;
        Self {
            n,
            d_steps,
            psi_line: TappedDelayLine::new(capacity),
            phi_lines: vec![TappedDelayLine::new(capacity); n],
            valid_seen: 0,
        }
    }

    pub fn d_steps(&self) -> usize {
        self.d_steps
    }

    /// Feeds one regression sample and returns the extended system at its time.
    pub fn extend(&mut self, sample: &RegressionSample) -> ExtendedRegression {
        assert_eq!(sample.phi.len(), self.n);
        self.psi_line.push(sample.psi);
        for (line, &v) in self.phi_lines.iter_mut().zip(&sample.phi) {
            line.push(v);
        }
        if sample.valid {
            self.valid_seen += 1;
        } else {
            self.valid_seen = 0;
        }
        let n = self.n;
        let psi_f = (1..=n).map(|i| self.psi_line.at(i * self.d_steps)).collect();
        let phi_f = Matrix::from_fn(n, |i, k| self.phi_lines[k].at((i + 1) * self.d_steps));
        ExtendedRegression {
            time: sample.time,
            psi_f,
            phi_f,
            warm: self.valid_seen > (n * self.d_steps) as u64,
        }
    }

    pub fn reset(&mut self) {
        self.psi_line.clear();
        self.phi_lines.iter_mut().for_each(TappedDelayLine::clear);
        self.valid_seen = 0;
    }
}

/// Mixes the extended system with normalization gain `epsilon`.
///
/// `adj(eps M) = eps^(n-1) adj(M)`, so both outputs carry a factor `eps^n`.
pub fn mix(ext: &ExtendedRegression, epsilon: f64) -> MixedSample {
    let n = ext.phi_f.size();
    let gain = libm::pow(epsilon, n as f64);
    let (adj, det) = adjugate_and_determinant(&ext.phi_f);
    let psi = adj
        .mul_vec(&ext.psi_f)
        .into_iter()
        .map(|v| gain * v)
        .collect();
    MixedSample {
        time: ext.time,
        delta: gain * det,
        psi,
        warm: ext.warm,
    }
}
