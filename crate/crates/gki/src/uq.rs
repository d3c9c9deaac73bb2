//! Norm bounds and simultaneous confidence intervals.
//!
//! For a query `x0` with kernel data `(r0, k0)` against fitted samples, the
//! set of RKHS functions that interpolate the data and have squared norm at
//! most `kappa` evaluates at `x0` to exactly one interval. Writing `g0` for
//! the Schur complement `r0 - k0^T K^{-1} k0` and `mean` for the interpolant
//! value at `x0`, the interval is
//!
//! `mean +- sqrt(g0 * (kappa - ||f||^2))`.
//!
//! Every query reuses the Cholesky factorization stored on the interpolant,
//! so a full band costs one factorization plus O(n^2) per query. An
//! independent code path recovers the same endpoints as the roots of the
//! quadratic built from the extended inverse; it exists to cross-validate
//! the closed form through a derivation that shares none of its steps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{fit_channels, Interpolant, SampleSet};
use crate::kernel::{cross_kernel, KernelSpec};
use crate::linalg::Matrix;

/// Relative floor on the Schur complement; below it the query is treated as
/// numerically coincident with the sample span.
const G0_RELATIVE_FLOOR: f64 = 1e-12;

/// Value slack when a query coincides with an observed sample.
const COINCIDENT_VALUE_TOLERANCE: f64 = 1e-9;

/// Batches below this size are not worth fanning out to the thread pool.
const PARALLEL_QUERY_THRESHOLD: usize = 64;

/// How a norm bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaMode {
    /// Distribution-free estimate from the sample values (band-limited
    /// kernels only).
    EstimatePw,
    /// User-supplied bound.
    Manual,
    /// No bound available: floor at the fitted norm, giving zero-width
    /// bands (point estimates only).
    NormFloor,
}

/// A squared-norm bound with the risk level and corrections that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaBound {
    kappa: f64,
    mode: KappaMode,
    gamma: f64,
    delta0: f64,
    delta_r: f64,
    literal_alg1: bool,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "risk gamma must lie strictly in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

impl KappaBound {
    /// A user-supplied bound on the squared norm of the truth.
    pub fn manual(kappa: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "manual kappa must be positive and finite, got {kappa}"
            )));
        }
        Ok(KappaBound {
            kappa,
            mode: KappaMode::Manual,
            gamma,
            delta0: 0.0,
            delta_r: 0.0,
            literal_alg1: false,
        })
    }

    /// No norm bound: the effective bound collapses to the fitted norm and
    /// every interval has zero width. `gamma` is recorded for reporting only;
    /// no reliability statement attaches to this mode.
    pub fn norm_floor(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(KappaBound {
            kappa: 0.0,
            mode: KappaMode::NormFloor,
            gamma,
            delta0: 0.0,
            delta_r: 0.0,
            literal_alg1: false,
        })
    }

    /// Enables the conservative `(n+1) * kappa` scaling by the extended
    /// problem size instead of the self-consistent plain `kappa`.
    pub fn with_literal_alg1(mut self, on: bool) -> Self {
        self.literal_alg1 = on;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mode(&self) -> KappaMode {
        self.mode
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn literal_alg1(&self) -> bool {
        self.literal_alg1
    }
}

/// Distribution-free norm-bound estimate for band-limited kernel spaces:
///
/// `kappa = mean(y^2) + sqrt(-ln(gamma) / (2n)) + delta0 + delta_r`.
///
/// `delta0` bounds the tail mass of the truth outside the band limit and
/// `delta_r` compensates quantized sample values; both default to 0 in the
/// pipelines. The estimate exceeds the squared truth norm with probability
/// at least `1 - gamma`; it is not valid for the Gaussian kernel.
pub fn estimate_kappa_pw(
    samples: &SampleSet,
    gamma: f64,
    delta0: f64,
    delta_r: f64,
) -> Result<KappaBound> {
    check_gamma(gamma)?;
    if !(delta0 >= 0.0) || !(delta_r >= 0.0) {
        return Err(Error::InvalidArgument(
            "delta0 and delta_r must be nonnegative".into(),
        ));
    }
    let n = samples.len() as f64;
    let mean_sq = samples.values().iter().map(|y| y * y).sum::<f64>() / n;
    let concentration = (-gamma.ln() / (2.0 * n)).sqrt();
    Ok(KappaBound {
        kappa: mean_sq + concentration + delta0 + delta_r,
        mode: KappaMode::EstimatePw,
        gamma,
        delta0,
        delta_r,
        literal_alg1: false,
    })
}

/// The bound actually used by interval construction, plus whether the floor
/// at the fitted norm had to engage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveKappa {
    pub value: f64,
    /// True when the supplied bound was below the fitted norm and was raised
    /// to it; callers should surface this as a warning, since the band then
    /// carries no slack from the stated bound.
    pub floored: bool,
}

/// Resolves a [`KappaBound`] against a fitted interpolant.
///
/// `n_extended` is the size of the extended system (number of samples plus
/// one); it scales the bound only in literal-algorithm mode. The result is
/// floored at the fitted squared norm so that the feasible set is never
/// empty and every interval contains the estimate.
pub fn effective_kappa(
    bound: &KappaBound,
    interp: &Interpolant,
    n_extended: usize,
) -> EffectiveKappa {
    let scale = if bound.literal_alg1 { n_extended as f64 } else { 1.0 };
    let scaled = scale * bound.kappa;
    if scaled >= interp.norm_sq() {
        EffectiveKappa { value: scaled, floored: false }
    } else {
        EffectiveKappa { value: interp.norm_sq(), floored: true }
    }
}

/// Schur-complement data of one query against the fitted samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurExtension {
    /// Schur complement `r0 - k0^T K^{-1} k0`, strictly positive.
    pub g0: f64,
    /// Interpolant value at the query, `k0^T alpha`.
    pub mean: f64,
    /// Kernel diagonal at the query (jitter included when the fit used one,
    /// so the extended system matches the stored factorization).
    pub r0: f64,
    /// Cross-kernel vector `k(x0, x_i)`.
    pub k0: Vec<f64>,
}

/// Computes the Schur complement `g0` and the predictive mean at `x0`.
///
/// One forward triangular solve gives `z = L^{-1} k0`, from which
/// `g0 = r0 - ||z||^2`; the mean reuses the stored weights. That is O(n^2)
/// per query against the retained factorization. When the fit used jitter,
/// the query diagonal gets the same jitter, i.e. the extension is performed
/// for the jitter-adjusted kernel.
pub fn schur_extend(interp: &Interpolant, x0: &[f64]) -> Result<SchurExtension> {
    let (r0_raw, k0) = cross_kernel(interp.spec(), x0, interp.samples().points())?;
    let r0 = r0_raw + interp.jitter();
    let z = interp.factor().forward(&k0);
    let g0 = r0 - z.iter().map(|v| v * v).sum::<f64>();
    if g0 <= G0_RELATIVE_FLOOR * r0 {
        return Err(Error::DegenerateQuery { g0 });
    }
    let mean = k0.iter().zip(interp.alpha()).map(|(k, a)| k * a).sum();
    Ok(SchurExtension { g0, mean, r0, k0 })
}

/// Materializes the inverse of the extended Gram matrix, query first:
///
/// `K0^{-1} = [ 1/g0, -w^T/g0 ; -w/g0, K^{-1} + w w^T / g0 ]`, `w = K^{-1} k0`.
///
/// This exists for verification and for the quadratic-root endpoint path
/// only; the interval fast path never builds it.
pub fn extended_inverse(interp: &Interpolant, x0: &[f64]) -> Result<Matrix> {
    let ext = schur_extend(interp, x0)?;
    let n = interp.samples().len();
    let w = interp.factor().solve(&ext.k0);
    let kinv = interp.factor().inverse();
    let mut m = Matrix::zeros(n + 1, n + 1);
    m[(0, 0)] = 1.0 / ext.g0;
    for i in 0..n {
        let v = -w[i] / ext.g0;
        m[(0, i + 1)] = v;
        m[(i + 1, 0)] = v;
        for j in 0..n {
            m[(i + 1, j + 1)] = kinv[(i, j)] + w[i] * w[j] / ext.g0;
        }
    }
    Ok(m)
}

/// Squared norm of the minimum-norm interpolant of the samples extended by
/// the hypothetical observation `(x0, y0)`:
///
/// `||f||^2 + (y0 - mean)^2 / g0`.
pub fn extended_norm_sq(interp: &Interpolant, x0: &[f64], y0: f64) -> Result<f64> {
    let ext = schur_extend(interp, x0)?;
    let d = y0 - ext.mean;
    Ok(interp.norm_sq() + d * d / ext.g0)
}

/// Tests whether the value `y0` at `x0` is consistent with some interpolant
/// of norm at most `kappa_eff`. At an observed sample the test reduces to
/// value equality within a small tolerance.
pub fn membership_test(
    interp: &Interpolant,
    kappa_eff: f64,
    x0: &[f64],
    y0: f64,
) -> Result<bool> {
    if let Some(k) = interp.samples().position_of(x0) {
        return Ok((y0 - interp.samples().values()[k]).abs() <= COINCIDENT_VALUE_TOLERANCE);
    }
    Ok(extended_norm_sq(interp, x0, y0)? <= kappa_eff)
}

/// One simultaneous confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub query: Vec<f64>,
    /// Interpolant value at the query; always the interval midpoint.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Schur complement at the query (0 for degenerate intervals).
    pub g0: f64,
    /// True when the query coincided with an observed sample.
    pub degenerate: bool,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Interval for `x0` under the bound `kappa_eff`, in closed form.
///
/// A query that coincides with an observed pixel returns the degenerate
/// interval at the observed value. Endpoints are not clamped to `[-1, 1]`;
/// rendering clamps.
pub fn confidence_interval(interp: &Interpolant, kappa_eff: f64, x0: &[f64]) -> Result<Interval> {
    if let Some(k) = interp.samples().position_of(x0) {
        let y = interp.samples().values()[k];
        return Ok(Interval {
            query: x0.to_vec(),
            estimate: y,
            lower: y,
            upper: y,
            g0: 0.0,
            degenerate: true,
        });
    }
    if kappa_eff < interp.norm_sq() {
        return Err(Error::InfeasibleBound { kappa: kappa_eff, norm_sq: interp.norm_sq() });
    }
    let ext = schur_extend(interp, x0)?;
    let halfwidth = (ext.g0 * (kappa_eff - interp.norm_sq())).sqrt();
    Ok(Interval {
        query: x0.to_vec(),
        estimate: ext.mean,
        lower: ext.mean - halfwidth,
        upper: ext.mean + halfwidth,
        g0: ext.g0,
        degenerate: false,
    })
}

/// Reference endpoints computed the long way round: assemble the extended
/// inverse, form the quadratic `a0*y0^2 + b0*y0 + c0 = 0` in the hypothesized
/// value, and return its roots `(lower, upper)`.
///
/// Exists to cross-validate [`confidence_interval`]; it is O(n^3) per query.
pub fn interval_via_quadratic(
    interp: &Interpolant,
    kappa_eff: f64,
    x0: &[f64],
) -> Result<(f64, f64)> {
    let m = extended_inverse(interp, x0)?;
    let n = interp.samples().len();
    let y = interp.samples().values();
    let a0 = m[(0, 0)];
    let b0 = 2.0 * (0..n).map(|i| m[(i + 1, 0)] * y[i]).sum::<f64>();
    let mut yay = 0.0;
    for i in 0..n {
        for j in 0..n {
            yay += y[i] * m[(i + 1, j + 1)] * y[j];
        }
    }
    let c0 = yay - kappa_eff;
    let disc = b0 * b0 - 4.0 * a0 * c0;
    if disc < 0.0 {
        // a strictly negative discriminant means the bound sits below the
        // extended minimum norm; tiny negatives are rounding of a zero-width
        // interval
        let scale = (b0 * b0).max((4.0 * a0 * c0).abs());
        if disc < -1e-9 * scale.max(1e-300) {
            return Err(Error::InfeasibleBound { kappa: kappa_eff, norm_sq: interp.norm_sq() });
        }
        let root = -b0 / (2.0 * a0);
        return Ok((root, root));
    }
    let sq = disc.sqrt();
    // numerically stable root pairing
    let q = -0.5 * (b0 + b0.signum() * sq);
    let (r1, r2) = if q == 0.0 {
        (-b0 / (2.0 * a0), -b0 / (2.0 * a0))
    } else {
        (q / a0, c0 / q)
    };
    Ok((r1.min(r2), r1.max(r2)))
}

/// Simultaneous intervals over a batch of queries, per-query failures kept
/// in place.
#[derive(Debug, Clone)]
pub struct ConfidenceBand {
    /// One entry per query, in query order.
    pub results: Vec<Result<Interval>>,
    /// The bound all intervals share.
    pub kappa_used: f64,
    /// Channel index for color images (0 for grayscale).
    pub channel: usize,
}

impl ConfidenceBand {
    /// Successful intervals, in query order.
    pub fn intervals(&self) -> impl Iterator<Item = &Interval> {
        self.results.iter().filter_map(|r| r.as_ref().ok())
    }

    /// Failed queries with their indices.
    pub fn failures(&self) -> Vec<(usize, &Error)> {
        self.results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
            .collect()
    }
}

/// Maps [`confidence_interval`] over `queries`.
///
/// Output order always matches input order. In strict mode the first failing
/// query aborts the batch, reported with its index; otherwise failures stay
/// embedded in the band.
pub fn band_over_queries(
    interp: &Interpolant,
    kappa_eff: f64,
    queries: &[Vec<f64>],
    strict: bool,
) -> Result<ConfidenceBand> {
    let results: Vec<Result<Interval>> = if queries.len() >= PARALLEL_QUERY_THRESHOLD {
        queries
            .par_iter()
            .map(|q| confidence_interval(interp, kappa_eff, q))
            .collect()
    } else {
        queries
            .iter()
            .map(|q| confidence_interval(interp, kappa_eff, q))
            .collect()
    };
    if strict {
        if let Some((index, err)) = results
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.as_ref().err().map(|e| (i, e.clone())))
        {
            return Err(Error::QueryFailed { index, source: Box::new(err) });
        }
    }
    Ok(ConfidenceBand { results, kappa_used: kappa_eff, channel: 0 })
}

/// How per-channel norm bounds are produced in multichannel runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaSource {
    /// Estimate from each channel's own sample values (band-limited kernels).
    EstimatePw { gamma: f64, delta0: f64, delta_r: f64, literal_alg1: bool },
    /// One user-supplied bound shared by all channels.
    Manual { kappa: f64, gamma: f64, literal_alg1: bool },
    /// Zero-width bands at the fitted norm.
    NormFloor { gamma: f64 },
}

impl KappaSource {
    fn bound_for(&self, samples: &SampleSet) -> Result<KappaBound> {
        match *self {
            KappaSource::EstimatePw { gamma, delta0, delta_r, literal_alg1 } => Ok(
                estimate_kappa_pw(samples, gamma, delta0, delta_r)?
                    .with_literal_alg1(literal_alg1),
            ),
            KappaSource::Manual { kappa, gamma, literal_alg1 } => {
                Ok(KappaBound::manual(kappa, gamma)?.with_literal_alg1(literal_alg1))
            }
            KappaSource::NormFloor { gamma } => KappaBound::norm_floor(gamma),
        }
    }
}

/// Bands for all channels of one image, sharing a single Gram factorization.
#[derive(Debug, Clone)]
pub struct MultichannelBand {
    /// One fitted interpolant per channel.
    pub interpolants: Vec<Interpolant>,
    /// One band per channel, aligned with `interpolants`.
    pub bands: Vec<ConfidenceBand>,
    /// The bound object each channel used.
    pub bounds: Vec<KappaBound>,
    /// Channels whose bound was floored at the fitted norm.
    pub floored: Vec<bool>,
}

/// Fits every channel on the shared input geometry and produces one band
/// per channel over the same queries. The per-query confidence region for a
/// color image is the box formed by the per-channel intervals.
pub fn multichannel_band(
    spec: KernelSpec,
    channels: Vec<SampleSet>,
    kappa: &KappaSource,
    queries: &[Vec<f64>],
    jitter: f64,
    strict: bool,
) -> Result<MultichannelBand> {
    let interpolants = fit_channels(spec, channels, jitter)?;
    let mut bands = Vec::with_capacity(interpolants.len());
    let mut bounds = Vec::with_capacity(interpolants.len());
    let mut floored = Vec::with_capacity(interpolants.len());
    for (c, interp) in interpolants.iter().enumerate() {
        let bound = kappa.bound_for(interp.samples())?;
        let eff = effective_kappa(&bound, interp, interp.samples().len() + 1);
        let mut band = band_over_queries(interp, eff.value, queries, strict)?;
        band.channel = c;
        bands.push(band);
        bounds.push(bound);
        floored.push(eff.floored);
    }
    Ok(MultichannelBand { interpolants, bands, bounds, floored })
}
