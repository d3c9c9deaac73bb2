//! Kernel specifications, pointwise evaluation, and Gram assembly.
//!
//! Two strictly positive definite kernels are supported:
//!
//! - band-limited (Paley-Wiener):
//!   `k(u,v) = (1/pi^d) * prod_j sin(eta*(u_j - v_j)) / (u_j - v_j)`,
//!   with each zero-difference factor equal to `eta`;
//! - Gaussian: `k(u,v) = exp(-||u - v||^2 / (2*sigma^2))`.
//!
//! Both make every Gram matrix of distinct points symmetric positive
//! definite, which is what the interpolation core relies on.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Kernel family plus its shape parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Band-limited kernel with frequency bound `eta`.
    PaleyWiener { eta: f64 },
    /// Gaussian kernel with length scale `sigma`.
    Gaussian { sigma: f64 },
}

/// A kernel bound to a fixed input dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    dim: usize,
}

/// Below this difference the sinc factor switches to its Taylor series;
/// `sin(eta*d)/d` loses precision once `d` underflows the quotient.
const PW_SERIES_THRESHOLD: f64 = 1e-8;

impl KernelSpec {
    pub fn paley_wiener(eta: f64, dim: usize) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "band-limit eta must be positive and finite, got {eta}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        Ok(KernelSpec { kind: KernelKind::PaleyWiener { eta }, dim })
    }

    pub fn gaussian(sigma: f64, dim: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "length scale sigma must be positive and finite, got {sigma}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        Ok(KernelSpec { kind: KernelKind::Gaussian { sigma }, dim })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `k(u,u)`: `(eta/pi)^d` for the band-limited kernel, 1 for Gaussian.
    pub fn diag_value(&self) -> f64 {
        match self.kind {
            KernelKind::PaleyWiener { eta } => {
                (eta / std::f64::consts::PI).powi(self.dim as i32)
            }
            KernelKind::Gaussian { .. } => 1.0,
        }
    }

    /// Evaluates `k(u, v)` after checking both dimensions.
    pub fn eval(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim, u)?;
        check_dim(self.dim, v)?;
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        // Coincident inputs take the same expression as the Gram diagonal so
        // that exact-coincidence checks see bit-equal values.
        if u == v {
            return self.diag_value();
        }
        match self.kind {
            KernelKind::PaleyWiener { eta } => {
                let mut prod = 1.0;
                for (a, b) in u.iter().zip(v) {
                    prod *= pw_factor(eta, a - b);
                }
                prod / std::f64::consts::PI.powi(self.dim as i32)
            }
            KernelKind::Gaussian { sigma } => {
                let mut sq = 0.0;
                for (a, b) in u.iter().zip(v) {
                    let d = a - b;
                    sq += d * d;
                }
                (-sq / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

/// One factor `sin(eta*d)/d` of the band-limited kernel, evaluated from
/// `|d|` so that swapping the arguments gives the bit-identical result.
fn pw_factor(eta: f64, delta: f64) -> f64 {
    let a = delta.abs();
    if a == 0.0 {
        eta
    } else if a < PW_SERIES_THRESHOLD {
        let t = eta * a;
        eta * (1.0 - t * t / 6.0)
    } else {
        (eta * a).sin() / a
    }
}

fn check_dim(expected: usize, p: &[f64]) -> Result<()> {
    if p.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: p.len() });
    }
    Ok(())
}

/// Gram matrix of `points`: entry `(i, j)` is `k(points[i], points[j])`.
///
/// The upper triangle is computed once and mirrored, so the result is
/// symmetric bit for bit.
pub fn gram(spec: &KernelSpec, points: &[Vec<f64>]) -> Result<Matrix> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("gram of an empty point set".into()));
    }
    for p in points {
        check_dim(spec.dim, p)?;
    }
    let n = points.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = spec.diag_value();
        for j in i + 1..n {
            let v = spec.eval_unchecked(&points[i], &points[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Kernel data linking a query to the samples: `r0 = k(x0, x0)` and
/// `k0[i] = k(x0, points[i])`.
pub fn cross_kernel(spec: &KernelSpec, x0: &[f64], points: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    check_dim(spec.dim, x0)?;
    for p in points {
        check_dim(spec.dim, p)?;
    }
    let r0 = spec.diag_value();
    let k0 = points.iter().map(|p| spec.eval_unchecked(x0, p)).collect();
    Ok((r0, k0))
}
