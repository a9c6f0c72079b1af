//! Small dense square matrices: determinant and adjugate.
//!
//! Sizes here are the harmonic count, so at most 8. Up to 4x4 the adjugate
//! is built from explicit cofactor expansion. Above that it comes from an LU
//! factorization as `det(M) * M^-1` when `M` is comfortably nonsingular, and
//! from cofactors (each minor's determinant by LU) otherwise, so that
//! `adj(M) M = det(M) I` keeps holding for singular `M`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Largest size for which cofactors are expanded symbolically.
const EXPLICIT_COFACTOR_MAX: usize = 4;

/// Below this ratio of `|det|` to the Hadamard bound, LU inversion is
/// considered unreliable and cofactors are used instead.
const INVERSE_RCOND_FLOOR: f64 = 1e-8;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from `n` rows of length `n`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "matrix rows must have length {n}");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| (0..self.n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Matrix with row `skip_row` and column `skip_col` removed.
    pub fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let m = self.n - 1;
        let mut data = Vec::with_capacity(m * m);
        for i in (0..self.n).filter(|&i| i != skip_row) {
            for j in (0..self.n).filter(|&j| j != skip_col) {
                data.push(self[(i, j)]);
            }
        }
        Self { n: m, data }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

fn det_explicit(m: &Matrix) -> f64 {
    match m.n {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        n => (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, j)] * det_explicit(&m.minor(0, j))
            })
            .sum(),
    }
}

/// LU factorization with partial pivoting, packed in place.
struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    det: f64,
}

impl Lu {
    fn new(m: &Matrix) -> Self {
        let n = m.n;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[(a, col)].abs().total_cmp(&lu[(b, col)].abs()))
                .unwrap_or(col);
            if pivot != col {
                for j in 0..n {
                    lu.data.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                det = -det;
            }
            let p = lu[(col, col)];
            det *= p;
            if p == 0.0 {
                continue;
            }
            for i in col + 1..n {
                let f = lu[(i, col)] / p;
                lu[(i, col)] = f;
                for j in col + 1..n {
                    lu[(i, j)] -= f * lu[(col, j)];
                }
            }
        }
        Self { lu, perm, det }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

fn hadamard_bound(m: &Matrix) -> f64 {
    (0..m.n)
        .map(|i| libm::sqrt(m.row(i).iter().map(|v| v * v).sum()))
        .product()
}

/// Determinant of `m`.
pub fn determinant(m: &Matrix) -> f64 {
    if m.n <= EXPLICIT_COFACTOR_MAX {
        det_explicit(m)
    } else {
        Lu::new(m).det
    }
}

fn adjugate_by_cofactors(m: &Matrix) -> Matrix {
    let n = m.n;
    // adj(M)[j][i] = (-1)^(i+j) det(minor(i, j))
    Matrix::from_fn(n, |j, i| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * determinant(&m.minor(i, j))
    })
}

/// Adjugate (transposed cofactor matrix), defined for singular `m` too.
pub fn adjugate(m: &Matrix) -> Matrix {
    let n = m.n;
    match n {
        0 => return Matrix::zeros(0),
        1 => return Matrix::identity(1),
        2 => {
            return Matrix::from_rows(&[[m[(1, 1)], -m[(0, 1)]], [-m[(1, 0)], m[(0, 0)]]]);
        }
        _ if n <= EXPLICIT_COFACTOR_MAX => return adjugate_by_cofactors(m),
        _ => {}
    }
    let lu = Lu::new(m);
    let bound = hadamard_bound(m);
    if bound == 0.0 || !(lu.det.abs() > INVERSE_RCOND_FLOOR * bound) {
        return adjugate_by_cofactors(m);
    }
    let mut adj = Matrix::zeros(n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[col] = lu.det;
        let x = lu.solve(&e);
        for (row, v) in x.into_iter().enumerate() {
            adj[(row, col)] = v;
        }
    }
    adj
}

/// Adjugate together with the determinant read off the first row of
/// `M adj(M)`, so the pair is consistent to rounding.
pub fn adjugate_and_determinant(m: &Matrix) -> (Matrix, f64) {
    let adj = adjugate(m);
    let det = if m.n == 0 {
        1.0
    } else {
        (0..m.n).map(|j| m[(0, j)] * adj[(j, 0)]).sum()
    };
    (adj, det)
}
