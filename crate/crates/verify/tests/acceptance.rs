//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`cargo test -p multisine-verify`) and exits
//! non-zero when any criterion fails. Tolerances and runtime limits are
//! fixed here and never loosened to make a line pass.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use multisine::config::validate_config;
use multisine::run::{run_scenario, RunOutput};
use multisine::scenarios;
use multisine_core::drem::{mix, Extender, MixedSample};
use multisine_core::estimation::{EstimatorConfig, EstimatorState};
use multisine_core::matrix::{adjugate, determinant, Matrix};
use multisine_core::parameterization::{true_theta, ParameterVector, Regressor};
use multisine_core::recovery::{recover, RecoveryConfig, DEFAULT_IMAG_TOL};
use multisine_core::signal::{HarmonicSpec, SignalSpec};
use multisine_core::tapped_delay::TappedDelayLine;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TS: f64 = 1e-3;
const H: f64 = 0.1;
const BAND: (f64, f64) = (0.5, 10.0);

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn err_max(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random distinct in-band frequencies with unit-scale amplitudes.
fn random_signal(rng: &mut StdRng, n: usize) -> (Vec<f64>, Vec<f64>, SignalSpec) {
    let freqs = loop {
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(BAND.0..BAND.1)).collect();
        w.sort_by(f64::total_cmp);
        if w.windows(2).all(|p| p[1] - p[0] > 0.05) {
            break w;
        }
    };
    let amps: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
    let spec = SignalSpec::new(
        freqs
            .iter()
            .zip(&amps)
            .map(|(&w, &a)| HarmonicSpec::new(a, w, rng.random_range(-PI..PI)).unwrap())
            .collect(),
    )
    .unwrap();
    (freqs, amps, spec)
}

fn annihilation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(101);
    let lag = 100;
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..10 {
            let (freqs, amps, spec) = random_signal(&mut rng, n);
            let mut x = spec.generate_trace(TS, 10.0).unwrap().values;
            for &w in &freqs {
                let c = (w * H).cos();
                let at = |x: &[f64], k: usize, back: usize| if k >= back { x[k - back] } else { 0.0 };
                x = (0..x.len())
                    .map(|k| at(&x, k, 2 * lag) + x[k] - 2.0 * c * at(&x, k, lag))
                    .collect();
            }
            let scale: f64 = amps.iter().sum();
            for v in &x[2 * n * lag..] {
                worst = worst.max(v.abs() / scale);
            }
        }
    }
    outcome(worst <= 1e-9, format!("max |res| / sum A = {worst:.2e} (limit 1e-9)"))
}

/// Regression scale: the coefficients of `[Z^2+1]^n` sum to `2^n`.
/// Mixing scale: the larger of the two compared terms over the run.
fn consistency() -> Outcome {
    let mut rng = StdRng::seed_from_u64(102);
    let (eps, d_steps) = (100.0, 130);
    let (mut reg_worst, mut mix_worst): (f64, f64) = (0.0, 0.0);
    let mut warm = 0usize;
    for n in 1..=3 {
        for _ in 0..5 {
            let (freqs, amps, spec) = random_signal(&mut rng, n);
            let theta = true_theta(&freqs, H).unwrap();
            let theta = theta.as_slice();
            let reg = Regressor::new(n, 100);
            let mut line = TappedDelayLine::new(reg.depth());
            let mut ext = Extender::new(n, d_steps);
            let reg_scale = f64::powi(2.0, n as i32) * amps.iter().sum::<f64>();
            let mut mixed = Vec::new();
            for k in 0..6000 {
                let t = k as f64 * TS;
                line.push(spec.sample(t));
                let s = reg.sample(&line, t);
                if s.valid {
                    let fit: f64 = s.phi.iter().zip(theta).map(|(a, b)| a * b).sum();
                    reg_worst = reg_worst.max((s.psi - fit).abs() / reg_scale);
                }
                let m = mix(&ext.extend(&s), eps);
                if m.warm {
                    mixed.push(m);
                }
            }
            warm += mixed.len();
            let mix_scale = mixed
                .iter()
                .flat_map(|m| m.psi.iter().zip(theta).map(move |(p, th)| p.abs().max((m.delta * th).abs())))
                .fold(0.0, f64::max);
            for m in &mixed {
                for (p, th) in m.psi.iter().zip(theta) {
                    mix_worst = mix_worst.max((p - m.delta * th).abs() / mix_scale);
                }
            }
        }
    }
    outcome(
        reg_worst <= 1e-9 && mix_worst <= 1e-9 && warm > 0,
        format!("regression {reg_worst:.2e}, mixing {mix_worst:.2e} over {warm} warm samples (limit 1e-9)"),
    )
}

fn closed_form_gradient() -> Outcome {
    let (gamma, delta) = (vec![0.8, 2.0], 1.3);
    let theta_star = [0.3, -0.2];
    let cfg = EstimatorConfig {
        gamma: gamma.clone(),
        t_ft: 100.0,
        w_floor: 1e-6,
        theta0: ParameterVector(vec![1.0, 1.0]),
    };
    let mut state = EstimatorState::new(&cfg);
    let mut worst: f64 = 0.0;
    for k in 0..=10_000usize {
        let mixed = MixedSample {
            time: k as f64 * TS,
            delta,
            psi: theta_star.iter().map(|th| delta * th).collect(),
            warm: true,
        };
        state.step_gradient(&mixed, &cfg, TS).unwrap();
        // the update integrates from the previous sample to this one
        let t = k as f64 * TS;
        if k == 1000 || k == 10_000 {
            for i in 0..2 {
                let expected = (1.0 - theta_star[i]) * (-gamma[i] * delta * delta * t).exp();
                worst = worst.max((state.theta_hat()[i] - theta_star[i] - expected).abs());
            }
        }
    }
    outcome(worst <= 1e-6, format!("max error at t = 1, 10 s: {worst:.2e} (limit 1e-6)"))
}

fn run_builtin(name: &str) -> RunOutput {
    let cfg = validate_config(&scenarios::builtin(name).unwrap()).unwrap();
    run_scenario(&cfg).unwrap()
}

fn finite_time_exactness() -> Outcome {
    let out = run_builtin("noiseless-2h");
    let at = out
        .records
        .iter()
        .position(|r| r.omega_ft.is_some())
        .expect("extraction fired");
    let first = out.records[at].omega_ft.clone().unwrap();
    let err = err_max(&first, &[2.0, 3.0]);
    let held = out.records[at..].iter().all(|r| r.omega_ft.as_ref() == Some(&first));
    let t = out.records[at].time;
    let on_time = (t - 5.0).abs() < TS / 2.0;
    outcome(
        err < 1e-2 && held && on_time,
        format!("omega_ft = {first:.9?} at t = {t} s, error {err:.2e} (limit 1e-2), held to end: {held}"),
    )
}

fn recovery_roundtrip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(105);
    let cfg = RecoveryConfig {
        h: H,
        omega_min: BAND.0,
        omega_max: BAND.1,
        imag_tol: DEFAULT_IMAG_TOL,
    };
    let (mut failures, mut worst) = (0, 0.0f64);
    let mut sets = 0;
    while sets < 1000 {
        let n = rng.random_range(1..=4);
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(BAND.0..BAND.1)).collect();
        w.sort_by(f64::total_cmp);
        let c: Vec<f64> = w.iter().map(|x| (x * H).cos()).collect();
        if c.windows(2).any(|p| (p[0] - p[1]).abs() < 1e-6) {
            continue;
        }
        sets += 1;
        let theta = true_theta(&w, H).unwrap();
        let err = match recover(theta.as_slice(), &cfg) {
            Ok(est) => err_max(&est.omega_hat, &w),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(err);
        if err > 1e-9 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{failures}/1000 sets above 1e-9, worst error {worst:.2e}"),
    )
}

fn noise_robustness() -> Outcome {
    let out = run_builtin("uniform-noise");
    let tail_start = out.records.len() - out.records.len() / 5;
    let tail = &out.records[tail_start..];
    let mut mean = [0.0; 2];
    let mut count = 0.0;
    for r in tail {
        if let Some(w) = &r.omega_grad {
            mean[0] += w[0];
            mean[1] += w[1];
            count += 1.0;
        }
    }
    let mean = [mean[0] / count, mean[1] / count];
    let grad_err = err_max(&mean, &[2.0, 3.0]);
    let ft = out.last().and_then(|r| r.omega_ft.clone());
    let ft_err = ft.as_ref().map_or(f64::INFINITY, |w| err_max(w, &[2.0, 3.0]));
    let complete = count as usize == tail.len();
    outcome(
        grad_err <= 0.15 && ft_err <= 0.2 && complete,
        format!(
            "mean omega_grad over last 12 s = {mean:.4?} (error {grad_err:.3}, limit 0.15); \
             omega_ft = {ft:.4?} (error {ft_err:.3}, limit 0.2)"
        ),
    )
}

fn step_change() -> Outcome {
    let target = [2.0, 3.0];
    let plain = run_builtin("step-change");
    let last = plain.last().unwrap();
    let grad_err = last.omega_grad.as_ref().map_or(f64::INFINITY, |w| err_max(w, &target));
    let stale_err = last.omega_ft.as_ref().map_or(f64::INFINITY, |w| err_max(w, &target));
    let reset = run_builtin("step-change-reset");
    let reset_err = reset
        .last()
        .and_then(|r| r.omega_ft.as_ref())
        .map_or(f64::INFINITY, |w| err_max(w, &target));
    let a = grad_err < 5e-2;
    let b = stale_err > grad_err;
    let c = reset_err <= 1e-2;
    outcome(
        a && b && c,
        format!(
            "at 60 s: grad error {grad_err:.3} (< 5e-2: {a}), un-reset ft error {stale_err:.3} \
             (> grad: {b}), reset ft error {reset_err:.2e} (<= 1e-2: {c})"
        ),
    )
}

/// Scale of the identity: `(1 + |M|) max(1, |M|)^(n-1)`, the size of
/// the adjugate entries times the norm of `M`.
fn adjugate_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(108);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=6);
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let m = Matrix::from_fn(n, |_, _| scale * rng.random_range(-1.0..1.0));
        let adj = adjugate(&m);
        let det = determinant(&m);
        let prod = adj.mul(&m);
        let norm = m.norm();
        let tol = 1e-10 * (1.0 + norm) * norm.max(1.0).powi(n as i32 - 1);
        let mut res = 0.0;
        for i in 0..n {
            for j in 0..n {
                let e = prod[(i, j)] - if i == j { det } else { 0.0 };
                res += e * e;
            }
        }
        worst = worst.max(res.sqrt() / tol);
    }
    outcome(worst <= 1.0, format!("max residual / tolerance = {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 annihilation oracle", annihilation, Duration::from_secs(5)),
        ("2 regression and mixing consistency", consistency, Duration::from_secs(5)),
        ("3 closed-form gradient", closed_form_gradient, Duration::from_secs(1)),
        ("4 finite-time exactness, noiseless-2h", finite_time_exactness, Duration::from_secs(10)),
        ("5 recovery roundtrip", recovery_roundtrip, Duration::from_secs(5)),
        ("6 noise robustness, uniform-noise", noise_robustness, Duration::MAX),
        ("7 step change", step_change, Duration::MAX),
        ("8 adjugate identity", adjugate_identity, Duration::from_secs(2)),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = result.pass && in_time;
        failed += usize::from(!pass);
        let budget = if limit == Duration::MAX {
            String::new()
        } else {
            format!(" / {:.0} s", limit.as_secs_f64())
        };
        println!(
            "{} {name}: {} [{:.2} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
