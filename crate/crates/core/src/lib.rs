//! Finite-time frequency estimation for signals made of `n` sinusoids.
//!
//! The estimator only ever looks at the measured samples. A tapped delay line
//! turns the signal into an `n`-th order linear regression whose parameters
//! are signed elementary symmetric polynomials of `cos(omega_i * h)`. The
//! regression is stacked with delayed copies of itself and mixed by the
//! adjugate of the stacked regressor matrix, which leaves `n` scalar
//! regressions that share one excitation signal `Delta`. Each scalar
//! parameter is tracked by a gradient estimator whose error dynamics are
//! known in closed form, so the exact parameter can be solved for as soon as
//! `Delta` has been nonzero for any amount of time. Frequencies are recovered
//! from the polynomial roots.
//!
//! ```
//! use multisine_core::pipeline::{PipelineConfig, Session};
//! use multisine_core::signal::{HarmonicSpec, SignalSpec};
//!
//! let spec = SignalSpec::new(vec![
//!     HarmonicSpec::new(1.0, 2.0, 0.0).unwrap(),
//!     HarmonicSpec::new(1.0, 3.0, core::f64::consts::FRAC_PI_2).unwrap(),
//! ])
//! .unwrap();
//! let cfg = PipelineConfig::published_two_harmonic();
//! let mut session = Session::new(&cfg).unwrap();
//! let mut last = None;
//! for k in 0..=6000 {
//!     let t = k as f64 * cfg.sample_period;
//!     last = Some(session.step(spec.sample(t)).unwrap());
//! }
//! let omega = last.unwrap().omega_ft.unwrap();
//! assert!((omega[0] - 2.0).abs() < 1e-6 && (omega[1] - 3.0).abs() < 1e-6);
//! ```

#![no_std]
// `!(x < limit)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod drem;
pub mod estimation;
pub mod matrix;
pub mod parameterization;
pub mod pipeline;
pub mod recovery;
pub mod signal;
pub mod tapped_delay;
pub mod validation;

mod grid;

pub use grid::{grid_steps, GridError};
