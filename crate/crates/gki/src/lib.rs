//! Minimum-norm kernel interpolation for images, with simultaneous
//! non-asymptotic confidence intervals for every reconstructed pixel.
//!
//! Observed pixels are treated as noise-free samples of a function living in
//! the reproducing kernel Hilbert space of a Paley-Wiener (band-limited) or
//! Gaussian kernel. The reconstruction is the minimum-norm interpolant of the
//! samples; around it, every unobserved pixel gets an interval that contains
//! all RKHS functions interpolating the data with norm below a bound `kappa`.
//! When `kappa` really bounds the norm of the ground truth, every interval
//! contains the true value simultaneously; a distribution-free estimate of
//! `kappa` from the samples themselves makes the guarantee hold with
//! probability at least `1 - gamma`.
//!
//! Each interval requires only the Schur complement of the sample Gram matrix
//! extended by the query point, so a whole band costs one factorization plus
//! O(n^2) per query instead of a fresh O(n^3) solve per pixel.
//!
//! Module map:
//! - [`kernel`]: kernel specifications, pointwise evaluation, Gram assembly.
//! - [`linalg`]: the small dense symmetric solver the crate is built on.
//! - [`interp`]: sample sets, fitting, prediction, interpolant norm.
//! - [`uq`]: norm bounds, Schur extensions, intervals, confidence bands.
//! - [`imaging`]: pixel grids, masks, NetPBM I/O, synthetic truths, renders.
//! - [`metrics`]: MSE / PSNR / SSIM / NRMSE between images.
//! - [`baselines`]: nearest, bilinear and bicubic upsamplers for comparison.

pub mod baselines;
pub mod error;
pub mod imaging;
pub mod interp;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod uq;

pub use error::{Error, Result};
pub use interp::{fit, fit_channels, Interpolant, SampleSet};
pub use kernel::{KernelKind, KernelSpec};
pub use uq::{ConfidenceBand, Interval, KappaBound};
