//! Minimal dense symmetric linear algebra.
//!
//! Row-major matrices plus an unpivoted Cholesky factorization: exactly what
//! the interpolation core needs. Shape errors are programmer errors and
//! panic; losing positive definiteness is a runtime condition and surfaces
//! as [`Error::NotPositiveDefinite`] with the failing pivot index.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec shape");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                let rrow = rhs.row(k);
                let orow = out.row_mut(i);
                for j in 0..rrow.len() {
                    orow[j] += a * rrow[j];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Adds `value` to every diagonal entry.
    pub fn add_diagonal(&mut self, value: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)] += value;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factors `a = L L^T`, reading only the lower triangle of `a`.
    ///
    /// Fails with the pivot index as soon as a diagonal pivot is not strictly
    /// positive (which also catches NaN input).
    pub fn factor(a: &Matrix) -> Result<Self> {
        assert_eq!(a.rows(), a.cols(), "cholesky needs a square matrix");
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = {
                    let li = &l.row(i)[..j];
                    let lj = &l.row(j)[..j];
                    a[(i, j)] - dot(li, lj)
                };
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    l[(i, j)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    /// Solves `L z = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "forward solve shape");
        let mut z = b.to_vec();
        for i in 0..n {
            let zi = (z[i] - dot(&self.l.row(i)[..i], &z[..i])) / self.l[(i, i)];
            z[i] = zi;
        }
        z
    }

    /// Solves `L^T x = z`.
    pub fn backward(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(z.len(), n, "backward solve shape");
        let mut x = z.to_vec();
        // Column-oriented substitution: once x[k] is final, its contribution
        // is swept out of all earlier rows using the contiguous row k of L.
        for k in (0..n).rev() {
            let xk = x[k] / self.l[(k, k)];
            x[k] = xk;
            let lrow = &self.l.row(k)[..k];
            for i in 0..k {
                x[i] -= lrow[i] * xk;
            }
        }
        x
    }

    /// Solves `A x = b` for the factored `A`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }

    /// Dense inverse of the factored matrix.
    ///
    /// Computes `Z = L^{-1}` (lower triangular, so each row update touches
    /// only a prefix) and then back-substitutes the whole block at once.
    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut z = Matrix::identity(n);
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik == 0.0 {
                    continue;
                }
                let (zk, zi) = split_rows(&mut z, k, i);
                for j in 0..=k {
                    zi[j] -= lik * zk[j];
                }
            }
            let inv = 1.0 / self.l[(i, i)];
            for v in &mut z.row_mut(i)[..=i] {
                *v *= inv;
            }
        }
        let mut x = z;
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l[(k, i)];
                if lki == 0.0 {
                    continue;
                }
                let (xi, xk) = split_rows(&mut x, i, k);
                for j in 0..n {
                    xi[j] -= lki * xk[j];
                }
            }
            let inv = 1.0 / self.l[(i, i)];
            for v in x.row_mut(i) {
                *v *= inv;
            }
        }
        x
    }
}

/// Two disjoint mutable row views, `a < b`.
fn split_rows(m: &mut Matrix, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(a < b);
    let cols = m.cols;
    let (head, tail) = m.data.split_at_mut(b * cols);
    (&mut head[a * cols..(a + 1) * cols], &mut tail[..cols])
}

/// Factors and inverts a symmetric positive definite matrix in one step.
pub fn invert_spd(a: &Matrix) -> Result<Matrix> {
    Ok(Cholesky::factor(a)?.inverse())
}
