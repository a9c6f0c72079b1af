//! Frequencies from an estimated parameter vector.
//!
//! `theta` holds the signed elementary symmetric polynomials of
//! `c_i = cos(omega_i h)`, so the `c_i` are the roots of
//! `x^n - theta_1 x^(n-1) - ... - theta_n`. Roots come from closed forms for
//! `n <= 2` and from the eigenvalues of the companion matrix otherwise
//! (balancing, Francis double-shift QR, then Newton polishing on the
//! polynomial). Each real root maps to `arccos(c) / h`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Largest polynomial degree accepted by [`find_roots`].
pub const MAX_DEGREE: usize = 8;

/// Default relative tolerance on imaginary parts, see [`roots_to_frequencies`].
pub const DEFAULT_IMAG_TOL: f64 = 1e-3;

const QR_MAX_ITERATIONS: usize = 60;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum RecoveryError {
    Degree { degree: usize },
    NotMonic { leading: f64 },
    NonFinite,
    /// QR iteration or residual check failed.
    NoConvergence { roots: Vec<Complex64>, residual: f64 },
    /// A root is too far off the real axis to be a cosine.
    NotPhysical { roots: Vec<Complex64> },
}

impl fmt::Display for RecoveryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Degree { degree } => {
                write!(f, "polynomial degree {degree} outside 1..={MAX_DEGREE}")
            }
            Self::NotMonic { leading } => write!(f, "leading coefficient {leading} is not 1"),
            Self::NonFinite => f.write_str("non-finite polynomial coefficient"),
            Self::NoConvergence { roots, residual } => write!(
                f,
                "root finder did not converge (residual {residual:e}, roots {roots:?})"
            ),
            Self::NotPhysical { roots } => write!(f, "estimate not physical, roots {roots:?}"),
        }
    }
}

impl core::error::Error for RecoveryError {}

/// Monic coefficients, highest power first: `[1, -theta_1, ..., -theta_n]`.
pub fn theta_to_polynomial(theta: &[f64]) -> Vec<f64> {
    core::iter::once(1.0).chain(theta.iter().map(|t| -t)).collect()
}

/// Evaluates the polynomial and its derivative at `z` (Horner).
fn eval_with_derivative(poly: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(poly[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &poly[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)|` for monic `poly`.
pub fn residual(poly: &[f64], z: Complex64) -> f64 {
    eval_with_derivative(poly, z).0.norm()
}

fn quadratic(b: f64, c: f64) -> [Complex64; 2] {
    // x^2 + b x + c, avoiding cancellation in the larger root
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + libm::copysign(libm::sqrt(disc), b));
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * libm::sqrt(-disc);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Dense row-major scratch for the eigenvalue routines.
struct Hessenberg {
    n: usize,
    a: Vec<f64>,
}

impl Hessenberg {
    fn companion(poly: &[f64]) -> Self {
        let n = poly.len() - 1;
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            a[j] = -poly[j + 1];
        }
        for i in 1..n {
            a[i * n + i - 1] = 1.0;
        }
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    /// Diagonal similarity by powers of two so rows and columns have
    /// comparable norms.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let sqrdx = RADIX * RADIX;
        let n = self.n;
        let mut done = false;
        while !done {
            done = true;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in (0..n).filter(|&j| j != i) {
                    c += self.at(j, i).abs();
                    r += self.at(i, j).abs();
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        *self.at_mut(i, j) *= g;
                    }
                    for j in 0..n {
                        *self.at_mut(j, i) *= f;
                    }
                }
            }
        }
    }

    /// All eigenvalues of the upper Hessenberg matrix by Francis
    /// double-shift QR; `None` if some eigenvalue needs more than
    /// `QR_MAX_ITERATIONS` sweeps.
    fn eigenvalues(mut self) -> Option<Vec<Complex64>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        let mut anorm = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                anorm += self.at(i, j).abs();
            }
        }
        let mut nn = n as isize - 1;
        let mut shift = 0.0;
        while nn >= 0 {
            let mut its = 0;
            loop {
                let nu = nn as usize;
                // locate a negligible subdiagonal element
                let mut l = nu;
                while l >= 1 {
                    let mut s = self.at(l - 1, l - 1).abs() + self.at(l, l).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(l, l - 1).abs() + s == s {
                        *self.at_mut(l, l - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                let mut x = self.at(nu, nu);
                if l == nu {
                    out.push(Complex64::new(x + shift, 0.0));
                    nn -= 1;
                    break;
                }
                let mut y = self.at(nu - 1, nu - 1);
                let mut w = self.at(nu, nu - 1) * self.at(nu - 1, nu);
                if l + 1 == nu {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let z = libm::sqrt(q.abs());
                    x += shift;
                    if q >= 0.0 {
                        let z = p + libm::copysign(z, p);
                        let hi = x + z;
                        let lo = if z != 0.0 { x - w / z } else { hi };
                        out.push(Complex64::new(hi, 0.0));
                        out.push(Complex64::new(lo, 0.0));
                    } else {
                        out.push(Complex64::new(x + p, z));
                        out.push(Complex64::new(x + p, -z));
                    }
                    nn -= 2;
                    break;
                }
                if its == QR_MAX_ITERATIONS {
                    return None;
                }
                if its == 10 || its == 20 {
                    // exceptional shift
                    shift += x;
                    for i in 0..=nu {
                        *self.at_mut(i, i) -= x;
                    }
                    let s = self.at(nu, nu - 1).abs() + self.at(nu - 1, nu - 2).abs();
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }
                its += 1;
                // look for two consecutive small subdiagonal elements
                let mut m = nu - 2;
                let (mut p, mut q, mut r);
                loop {
                    let z = self.at(m, m);
                    let rr = x - z;
                    let ss = y - z;
                    p = (rr * ss - w) / self.at(m + 1, m) + self.at(m, m + 1);
                    q = self.at(m + 1, m + 1) - z - rr - ss;
                    r = self.at(m + 2, m + 1);
                    let s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    let u = self.at(m, m - 1).abs() * (q.abs() + r.abs());
                    let v = p.abs()
                        * (self.at(m - 1, m - 1).abs() + z.abs() + self.at(m + 1, m + 1).abs());
                    if u + v == v {
                        break;
                    }
                    m -= 1;
                }
                for i in m + 2..=nu {
                    *self.at_mut(i, i - 2) = 0.0;
                    if i != m + 2 {
                        *self.at_mut(i, i - 3) = 0.0;
                    }
                }
                // double QR step on rows l..=nu, columns m..=nu
                let mut k = m;
                while k < nu {
                    let mut scale = 1.0;
                    if k != m {
                        p = self.at(k, k - 1);
                        q = self.at(k + 1, k - 1);
                        r = if k + 1 != nu { self.at(k + 2, k - 1) } else { 0.0 };
                        scale = p.abs() + q.abs() + r.abs();
                        if scale != 0.0 {
                            p /= scale;
                            q /= scale;
                            r /= scale;
                        }
                    }
                    let s = libm::copysign(libm::sqrt(p * p + q * q + r * r), p);
                    if s != 0.0 {
                        if k == m {
                            if l != m {
                                *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                            }
                        } else {
                            *self.at_mut(k, k - 1) = -s * scale;
                        }
                        p += s;
                        let xx = p / s;
                        let yy = q / s;
                        let zz = r / s;
                        q /= p;
                        r /= p;
                        for j in k..=nu {
                            let mut pp = self.at(k, j) + q * self.at(k + 1, j);
                            if k + 1 != nu {
                                pp += r * self.at(k + 2, j);
                                *self.at_mut(k + 2, j) -= pp * zz;
                            }
                            *self.at_mut(k + 1, j) -= pp * yy;
                            *self.at_mut(k, j) -= pp * xx;
                        }
                        let last = nu.min(k + 3);
                        for i in l..=last {
                            let mut pp = xx * self.at(i, k) + yy * self.at(i, k + 1);
                            if k + 1 != nu {
                                pp += zz * self.at(i, k + 2);
                                *self.at_mut(i, k + 2) -= pp * r;
                            }
                            *self.at_mut(i, k + 1) -= pp * q;
                            *self.at_mut(i, k) -= pp;
                        }
                    }
                    k += 1;
                }
            }
        }
        Some(out)
    }
}

/// Newton steps on the original polynomial, each accepted only if it
/// lowers `|p|` and stays well inside the gap to the other roots.
fn polish(poly: &[f64], roots: &mut [Complex64]) {
    for idx in 0..roots.len() {
        let gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, r)| (r - roots[idx]).norm())
            .fold(f64::INFINITY, f64::min);
        let mut z = roots[idx];
        let (mut p, mut dp) = eval_with_derivative(poly, z);
        for _ in 0..8 {
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.norm() < 0.25 * gap) {
                break;
            }
            let candidate = z - step;
            let (cp, cdp) = eval_with_derivative(poly, candidate);
            if !(cp.norm() < p.norm()) {
                break;
            }
            z = candidate;
            p = cp;
            dp = cdp;
        }
        roots[idx] = z;
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `p(x)` by compensated Horner: about twice the working precision.
fn eval_compensated(poly: &[f64], x: f64) -> f64 {
    let mut s = poly[0];
    let mut c = 0.0;
    for &a in &poly[1..] {
        let p = s * x;
        let pe = libm::fma(s, x, -p);
        let (t, se) = two_sum(p, a);
        s = t;
        c = c * x + (pe + se);
    }
    s + c
}

fn derivative_real(poly: &[f64], x: f64) -> f64 {
    let degree = poly.len() - 1;
    poly[..degree]
        .iter()
        .enumerate()
        .fold(0.0, |acc, (i, &a)| acc * x + a * (degree - i) as f64)
}

/// Newton on real roots with an accurate residual, so clustered roots
/// end up limited by the rounding of the coefficients only.
fn refine_real(poly: &[f64], roots: &mut [Complex64]) {
    for idx in 0..roots.len() {
        if roots[idx].im != 0.0 {
            continue;
        }
        let gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, r)| (r - roots[idx]).norm())
            .fold(f64::INFINITY, f64::min);
        let mut x = roots[idx].re;
        let mut p = eval_compensated(poly, x);
        for _ in 0..6 {
            let dp = derivative_real(poly, x);
            if p == 0.0 || dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.abs() < 0.25 * gap) {
                break;
            }
            let candidate = x - step;
            let cp = eval_compensated(poly, candidate);
            if !(cp.abs() <= p.abs()) || candidate == x {
                break;
            }
            x = candidate;
            p = cp;
        }
        roots[idx].re = x;
    }
}

/// All roots of a monic polynomial given highest power first.
pub fn find_roots(poly: &[f64]) -> Result<Vec<Complex64>, RecoveryError> {
    let degree = poly.len().saturating_sub(1);
    if degree == 0 || degree > MAX_DEGREE {
        return Err(RecoveryError::Degree { degree });
    }
    if poly.iter().any(|c| !c.is_finite()) {
        return Err(RecoveryError::NonFinite);
    }
    if poly[0] != 1.0 {
        return Err(RecoveryError::NotMonic { leading: poly[0] });
    }
    let mut roots = match degree {
        1 => vec![Complex64::new(-poly[1], 0.0)],
        2 => quadratic(poly[1], poly[2]).to_vec(),
        _ => {
            let mut h = Hessenberg::companion(poly);
            h.balance();
            match h.eigenvalues() {
                Some(r) => r,
                None => {
                    return Err(RecoveryError::NoConvergence {
                        roots: Vec::new(),
                        residual: f64::INFINITY,
                    })
                }
            }
        }
    };
    if degree > 2 {
        polish(poly, &mut roots);
    }
    refine_real(poly, &mut roots);
    let coef_max = poly.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let worst = roots.iter().map(|&z| residual(poly, z)).fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL * (1.0 + coef_max)) {
        return Err(RecoveryError::NoConvergence {
            roots,
            residual: worst,
        });
    }
    Ok(roots)
}

/// Sorted frequency estimates with recovery diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEstimate {
    /// Ascending, inside `[omega_min, omega_max]`.
    pub omega_hat: Vec<f64>,
    /// Largest `|Im|` among the roots before it was discarded.
    pub residual: f64,
    /// Some real part fell outside `[-1, 1]` and was clamped.
    pub clamped: bool,
}

/// Maps cosine roots to frequencies.
///
/// Imaginary parts up to `imag_tol * (1 + |Re|)` are discarded, real parts
/// are clamped into `[-1, 1]`, and `arccos(c) / h` is projected into
/// `bounds`.
pub fn roots_to_frequencies(
    roots: &[Complex64],
    h: f64,
    bounds: (f64, f64),
    imag_tol: f64,
) -> Result<FrequencyEstimate, RecoveryError> {
    let mut residual = 0.0f64;
    for z in roots {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(RecoveryError::NonFinite);
        }
        if z.im.abs() > imag_tol * (1.0 + z.re.abs()) {
            return Err(RecoveryError::NotPhysical {
                roots: roots.to_vec(),
            });
        }
        residual = residual.max(z.im.abs());
    }
    let (lo, hi) = bounds;
    let mut clamped = false;
    let mut omega_hat: Vec<f64> = roots
        .iter()
        .map(|z| {
            if z.re.abs() > 1.0 {
                clamped = true;
            }
            let c = z.re.clamp(-1.0, 1.0);
            (libm::acos(c) / h).clamp(lo, hi)
        })
        .collect();
    omega_hat.sort_by(f64::total_cmp);
    Ok(FrequencyEstimate {
        omega_hat,
        residual,
        clamped,
    })
}

/// Recovery settings shared by the gradient and finite-time paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    pub h: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub imag_tol: f64,
}

/// `theta` to sorted frequencies in one call.
pub fn recover(theta: &[f64], cfg: &RecoveryConfig) -> Result<FrequencyEstimate, RecoveryError> {
    let roots = find_roots(&theta_to_polynomial(theta))?;
    roots_to_frequencies(&roots, cfg.h, (cfg.omega_min, cfg.omega_max), cfg.imag_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameterization::true_theta;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    // coefficients of prod (x - r_i), highest first
    fn from_roots(roots: &[f64]) -> Vec<f64> {
        roots.iter().fold(vec![1.0], |acc, &r| {
            let mut next = vec![0.0; acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i] += a;
                next[i + 1] -= r * a;
            }
            next
        })
    }

    fn sorted_re(mut roots: Vec<Complex64>) -> Vec<f64> {
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        roots.into_iter().map(|z| z.re).collect()
    }

    const BAND: (f64, f64) = (0.1, 15.0);

    #[test]
    fn polynomial_from_theta() {
        let t = libm::cos(0.2);
        assert_eq!(theta_to_polynomial(&[t]), vec![1.0, -t]);
        assert_eq!(
            theta_to_polynomial(&[1.935_403_1, -0.936_293_4]),
            vec![1.0, -1.935_403_1, 0.936_293_4]
        );
        let p = theta_to_polynomial(&[0.0; 4]);
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(find_roots(&p).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn two_tone_quadratic() {
        let theta = true_theta(&[2.0, 3.0], 0.1).unwrap();
        let p = theta_to_polynomial(theta.as_slice());
        let (c1, c2) = (libm::cos(0.2), libm::cos(0.3));
        let expect = from_roots(&[c1, c2]);
        for (a, b) in p.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let roots = sorted_re(find_roots(&p).unwrap());
        assert!((roots[0] - 0.955_336_5).abs() < 1e-7);
        assert!((roots[1] - 0.980_066_6).abs() < 1e-7);
        assert!((roots[0] - c2).abs() < 1e-9 && (roots[1] - c1).abs() < 1e-9);
    }

    #[test]
    fn double_root() {
        let p = [1.0, -1.0, 0.25];
        let roots = find_roots(&p).unwrap();
        for z in roots {
            assert!((z.re - 0.5).abs() < 1e-12 && z.im == 0.0);
        }
    }

    #[test]
    fn constructed_polynomials_roundtrip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        for degree in 3..=MAX_DEGREE {
            for _ in 0..50 {
                let mut r: Vec<f64> = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
                r.sort_by(f64::total_cmp);
                if r.windows(2).any(|w| w[1] - w[0] < 0.05) {
                    continue;
                }
                let found = sorted_re(find_roots(&from_roots(&r)).unwrap());
                for (a, b) in found.iter().zip(&r) {
                    assert!((a - b).abs() < 1e-9, "degree {degree}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn complex_pairs_are_found() {
        // (x^2 + 1)(x - 0.5)
        let p = [1.0, -0.5, 1.0, -0.5];
        let mut roots = find_roots(&p).unwrap();
        roots.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((roots[2] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(matches!(
            roots_to_frequencies(&roots, 0.1, BAND, DEFAULT_IMAG_TOL),
            Err(RecoveryError::NotPhysical { .. })
        ));
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(find_roots(&[1.0]), Err(RecoveryError::Degree { degree: 0 }));
        assert_eq!(
            find_roots(&[1.0; 10]),
            Err(RecoveryError::Degree { degree: 9 })
        );
        assert_eq!(find_roots(&[2.0, 1.0]), Err(RecoveryError::NotMonic { leading: 2.0 }));
        assert_eq!(find_roots(&[1.0, f64::NAN]), Err(RecoveryError::NonFinite));
    }

    #[test]
    fn cosines_to_frequencies() {
        let roots = [
            Complex64::new(libm::cos(0.2), 0.0),
            Complex64::new(libm::cos(0.3), 0.0),
        ];
        let est = roots_to_frequencies(&roots, 0.1, BAND, DEFAULT_IMAG_TOL).unwrap();
        assert!((est.omega_hat[0] - 2.0).abs() < 1e-6);
        assert!((est.omega_hat[1] - 3.0).abs() < 1e-6);
        assert!(!est.clamped);

        let one = roots_to_frequencies(&[Complex64::new(1.0, 0.0)], 0.1, BAND, 1e-3).unwrap();
        assert_eq!(one.omega_hat, vec![BAND.0]);
        assert!(!one.clamped);

        let over = roots_to_frequencies(&[Complex64::new(1.02, 0.0)], 0.1, BAND, 1e-3).unwrap();
        assert!(over.clamped);
        assert_eq!(over.omega_hat, vec![BAND.0]);

        let tiny_im = roots_to_frequencies(&[Complex64::new(0.5, 1e-5)], 0.1, BAND, 1e-3).unwrap();
        assert_eq!(tiny_im.residual, 1e-5);
    }

    #[test]
    fn mapping_decreases_across_the_band() {
        let (h, lo, hi) = (0.1, 0.5, 10.0);
        let c_hi = libm::cos(lo * h);
        let c_lo = libm::cos(hi * h);
        let at = |c: f64| {
            roots_to_frequencies(&[Complex64::new(c, 0.0)], h, (lo, hi), 1e-3).unwrap().omega_hat[0]
        };
        assert!((at(c_hi) - lo).abs() < 1e-9);
        assert!((at(c_lo) - hi).abs() < 1e-9);
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let c = c_lo + (c_hi - c_lo) * k as f64 / 100.0;
            let w = at(c);
            assert!(w < prev);
            prev = w;
        }
    }

    proptest! {
        #[test]
        fn roundtrip_and_permutation_invariance(
            raw in proptest::collection::vec(0.5f64..15.0, 1..=4),
            rotate in 0usize..4,
        ) {
            let h = 0.1;
            let mut freqs = raw.clone();
            freqs.sort_by(f64::total_cmp);
            let separated = freqs
                .windows(2)
                .all(|w| (libm::cos(w[0] * h) - libm::cos(w[1] * h)).abs() >= 1e-6);
            prop_assume!(separated);
            let cfg = RecoveryConfig { h, omega_min: 0.1, omega_max: 15.5, imag_tol: 1e-3 };
            let theta = true_theta(&raw, h).unwrap();
            let est = recover(theta.as_slice(), &cfg).unwrap();
            // first-order sensitivity of omega_i to a rounding of theta
            let coef: f64 = 1.0 + theta.as_slice().iter().map(|t| t.abs()).sum::<f64>();
            for (i, (a, b)) in est.omega_hat.iter().zip(&freqs).enumerate() {
                let c = libm::cos(b * h);
                let slope: f64 = freqs
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, w)| c - libm::cos(w * h))
                    .product();
                let cond = coef / (slope.abs() * h * libm::sin(b * h));
                prop_assert!((a - b).abs() <= 1e-9 + 64.0 * f64::EPSILON * cond, "{} vs {}", a, b);
            }
            let mut permuted = raw.clone();
            let len = permuted.len();
            permuted.rotate_left(rotate % len);
            let other = recover(true_theta(&permuted, h).unwrap().as_slice(), &cfg).unwrap();
            prop_assert_eq!(est, other);
        }
    }
}
