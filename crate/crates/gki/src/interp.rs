//! Minimum-norm interpolant fitting, prediction, and norm computation.
//!
//! Given noise-free samples `(x_k, y_k)` and a strictly positive definite
//! kernel, the unique minimum-norm interpolant is `f(x) = sum_k alpha_k *
//! k(x, x_k)` with `alpha = K^{-1} y`, and its squared norm is `y^T alpha`.
//! The Cholesky factorization of the Gram matrix `K` is kept on the fitted
//! interpolant (behind an `Arc`, shared across color channels) because the
//! uncertainty module reuses it for every query.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{gram, KernelSpec};
use crate::linalg::Cholesky;

/// Slack on the `[-1, 1]` intensity range, absorbing normalization rounding.
const VALUE_RANGE_TOLERANCE: f64 = 1e-9;

/// Observed input/value pairs: distinct points, intensities in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    dim: usize,
}

impl SampleSet {
    /// Validates and wraps samples: at least one sample, one consistent
    /// dimension, finite coordinates, pairwise distinct points, and values
    /// within `[-1, 1]` up to a small tolerance.
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        if points.len() != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} points vs {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("points must have dimension >= 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument("non-finite sample coordinate".into()));
            }
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() || v.abs() > 1.0 + VALUE_RANGE_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "sample value {v} at index {k} outside [-1, 1]"
                )));
            }
        }
        if let Some((first, second)) = find_duplicate(&points) {
            return Err(Error::DuplicateInputs { first, second });
        }
        Ok(SampleSet { points, values, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the sample whose point equals `x` exactly, if any. Exact
    /// comparison is intentional: queries and samples come from the same
    /// pixel-grid mapping, so coincidence is bitwise.
    pub fn position_of(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == x)
    }
}

/// Reports the original indices of one colliding pair, lowest pair first.
fn find_duplicate(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .expect("coordinates validated finite")
    });
    for pair in order.windows(2) {
        if points[pair[0]] == points[pair[1]] {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Some((a, b));
        }
    }
    None
}

/// A fitted minimum-norm interpolant with its retained Gram factorization.
#[derive(Debug, Clone)]
pub struct Interpolant {
    spec: KernelSpec,
    samples: SampleSet,
    factor: Arc<Cholesky>,
    alpha: Vec<f64>,
    norm_sq: f64,
    jitter: f64,
}

/// Fits the minimum-norm interpolant of `samples`.
///
/// `jitter` is added to the Gram diagonal when positive; it trades exact
/// interpolation for stability on near-singular grids and defaults to 0 in
/// every pipeline. Factorization failure carries the offending pivot.
pub fn fit(spec: KernelSpec, samples: SampleSet, jitter: f64) -> Result<Interpolant> {
    if !(jitter >= 0.0) || !jitter.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "jitter must be finite and nonnegative, got {jitter}"
        )));
    }
    if samples.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: samples.dim() });
    }
    let mut k = gram(&spec, samples.points())?;
    if jitter > 0.0 {
        k.add_diagonal(jitter);
    }
    let factor = Arc::new(Cholesky::factor(&k)?);
    Ok(finish_fit(spec, samples, factor, jitter))
}

/// Fits one interpolant per channel over a shared input geometry.
///
/// All sample sets must have identical points; the Gram matrix depends only
/// on the points, so it is assembled and factored once and shared.
pub fn fit_channels(
    spec: KernelSpec,
    channels: Vec<SampleSet>,
    jitter: f64,
) -> Result<Vec<Interpolant>> {
    if channels.is_empty() {
        return Err(Error::InvalidArgument("need at least one channel".into()));
    }
    for c in &channels[1..] {
        if c.points() != channels[0].points() {
            return Err(Error::InvalidArgument(
                "channel sample sets must share identical input points".into(),
            ));
        }
    }
    if !(jitter >= 0.0) || !jitter.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "jitter must be finite and nonnegative, got {jitter}"
        )));
    }
    if channels[0].dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: channels[0].dim() });
    }
    let mut k = gram(&spec, channels[0].points())?;
    if jitter > 0.0 {
        k.add_diagonal(jitter);
    }
    let factor = Arc::new(Cholesky::factor(&k)?);
    Ok(channels
        .into_iter()
        .map(|samples| finish_fit(spec, samples, Arc::clone(&factor), jitter))
        .collect())
}

fn finish_fit(
    spec: KernelSpec,
    samples: SampleSet,
    factor: Arc<Cholesky>,
    jitter: f64,
) -> Interpolant {
    let alpha = factor.solve(samples.values());
    let norm_sq = samples
        .values()
        .iter()
        .zip(&alpha)
        .map(|(y, a)| y * a)
        .sum::<f64>()
        .max(0.0);
    Interpolant { spec, samples, factor, alpha, norm_sq, jitter }
}

impl Interpolant {
    /// Evaluates the interpolant at `x0`.
    pub fn predict(&self, x0: &[f64]) -> Result<f64> {
        if x0.len() != self.spec.dim() {
            return Err(Error::DimensionMismatch { expected: self.spec.dim(), got: x0.len() });
        }
        Ok(self
            .samples
            .points()
            .iter()
            .zip(&self.alpha)
            .map(|(p, a)| a * self.spec.eval_unchecked(x0, p))
            .sum())
    }

    /// Squared RKHS norm of the interpolant, `y^T alpha`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub(crate) fn factor(&self) -> &Cholesky {
        &self.factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian(sigma: f64) -> KernelSpec {
        KernelSpec::gaussian(sigma, 2).unwrap()
    }

    fn random_instance(n: usize, seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let values = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        SampleSet::new(points, values).unwrap()
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new(vec![], vec![]).is_err());
        assert!(SampleSet::new(vec![vec![0.5, 0.5]], vec![0.5, 0.1]).is_err());
        assert!(SampleSet::new(vec![vec![0.5, 0.5]], vec![1.5]).is_err());
        assert!(SampleSet::new(vec![vec![0.5, f64::NAN]], vec![0.5]).is_err());
        assert!(SampleSet::new(vec![vec![0.5, 0.5], vec![0.1]], vec![0.0, 0.0]).is_err());
        // boundary tolerance admits normalized extremes
        assert!(SampleSet::new(vec![vec![0.5, 0.5]], vec![1.0]).is_ok());
    }

    #[test]
    fn duplicate_points_name_both_indices() {
        let pts = vec![
            vec![0.1, 0.1],
            vec![0.7, 0.2],
            vec![0.4, 0.9],
            vec![0.7, 0.2],
        ];
        match SampleSet::new(pts, vec![0.0; 4]) {
            Err(Error::DuplicateInputs { first, second }) => {
                assert_eq!((first, second), (1, 3));
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn single_gaussian_sample() {
        let s = SampleSet::new(vec![vec![0.5, 0.5]], vec![0.8]).unwrap();
        let f = fit(gaussian(0.05), s, 0.0).unwrap();
        assert!((f.alpha()[0] - 0.8).abs() < 1e-15);
        assert!((f.norm_sq() - 0.64).abs() < 1e-15);
        // prediction at distance sigma: 0.5 * exp(-0.5) with the sample at origin
        let s = SampleSet::new(vec![vec![0.0, 0.0]], vec![0.5]).unwrap();
        let f = fit(gaussian(0.05), s, 0.0).unwrap();
        let v = f.predict(&[0.05, 0.0]).unwrap();
        assert!((v - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.3032653).abs() < 1e-7);
    }

    #[test]
    fn single_pw_sample_uses_diagonal() {
        let spec = KernelSpec::paley_wiener(50.0, 2).unwrap();
        let y1 = 0.73;
        let s = SampleSet::new(vec![vec![0.3, 0.6]], vec![y1]).unwrap();
        let f = fit(spec, s, 0.0).unwrap();
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!((f.alpha()[0] - y1 * pi2 / 2500.0).abs() < 1e-15);
        assert!((f.norm_sq() - y1 * y1 * pi2 / 2500.0).abs() < 1e-15);
    }

    #[test]
    fn fit_rejects_duplicates_and_bad_jitter() {
        let dup = SampleSet::new(vec![vec![0.2, 0.2], vec![0.2, 0.2]], vec![0.1, 0.2]);
        assert!(matches!(dup, Err(Error::DuplicateInputs { first: 0, second: 1 })));
        let s = random_instance(4, 0);
        assert!(fit(gaussian(0.1), s.clone(), -1e-9).is_err());
        assert!(fit(gaussian(0.1), s, f64::NAN).is_err());
    }

    #[test]
    fn near_duplicate_points_fail_with_pivot_and_jitter_rescues() {
        let pts = vec![vec![0.2, 0.2], vec![0.2 + 1e-13, 0.2], vec![0.8, 0.8]];
        let vals = vec![0.1, 0.1, -0.4];
        let s = SampleSet::new(pts, vals).unwrap();
        match fit(gaussian(0.1), s.clone(), 0.0) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected conditioning failure, got {other:?}"),
        }
        let rescued = fit(gaussian(0.1), s, 1e-8).unwrap();
        assert!(rescued.norm_sq() >= 0.0);
    }

    #[test]
    fn predict_reproduces_samples_and_jitter_degrades_monotonically() {
        let s = random_instance(25, 3);
        let exact = fit(gaussian(0.1), s.clone(), 0.0).unwrap();
        let max_y = s.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut prev_dev = 0.0f64;
        for (p, y) in s.points().iter().zip(s.values()) {
            let dev = (exact.predict(p).unwrap() - y).abs();
            assert!(dev <= 1e-6 * max_y.max(1.0));
            prev_dev = prev_dev.max(dev);
        }
        let mut last = prev_dev;
        for jitter in [1e-8, 1e-5, 1e-2] {
            let f = fit(gaussian(0.1), s.clone(), jitter).unwrap();
            let dev = s
                .points()
                .iter()
                .zip(s.values())
                .map(|(p, y)| (f.predict(p).unwrap() - y).abs())
                .fold(0.0f64, f64::max);
            assert!(dev >= last, "deviation should grow with jitter");
            last = dev;
        }
    }

    #[test]
    fn zero_data_predicts_zero() {
        let pts = (0..6).map(|i| vec![0.1 * i as f64 + 0.1, 0.5]).collect();
        let s = SampleSet::new(pts, vec![0.0; 6]).unwrap();
        let f = fit(gaussian(0.1), s, 0.0).unwrap();
        assert_eq!(f.norm_sq(), 0.0);
        assert_eq!(f.predict(&[0.33, 0.44]).unwrap(), 0.0);
    }

    #[test]
    fn norm_matches_triple_product_oracle() {
        let s = random_instance(10, 7);
        let spec = gaussian(0.2);
        let f = fit(spec, s.clone(), 0.0).unwrap();
        let k = crate::kernel::gram(&spec, s.points()).unwrap();
        let ka = k.matvec(f.alpha());
        let triple: f64 = f.alpha().iter().zip(&ka).map(|(a, b)| a * b).sum();
        assert!((f.norm_sq() - triple).abs() <= 1e-9 * triple.abs().max(1e-30));
    }

    #[test]
    fn minimum_norm_among_interpolants_of_larger_span() {
        // Alternatives interpolate the same data using the sample centers
        // plus extra kernel centers; none may beat the minimum-norm fit.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let spec = gaussian(0.3);
        let s = random_instance(5, 22);
        let f = fit(spec, s.clone(), 0.0).unwrap();
        for _ in 0..100 {
            let extras: Vec<Vec<f64>> = (0..3)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let beta: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            // residual the sample centers must absorb
            let mut centers = s.points().to_vec();
            centers.extend(extras.iter().cloned());
            let mut coeff = {
                let k = crate::kernel::gram(&spec, s.points()).unwrap();
                let chol = crate::linalg::Cholesky::factor(&k).unwrap();
                let resid: Vec<f64> = s
                    .points()
                    .iter()
                    .zip(s.values())
                    .map(|(p, y)| {
                        let extra: f64 = extras
                            .iter()
                            .zip(&beta)
                            .map(|(c, b)| b * spec.eval(p, c).unwrap())
                            .sum();
                        y - extra
                    })
                    .collect();
                chol.solve(&resid)
            };
            coeff.extend(beta.iter().cloned());
            let kk = crate::kernel::gram(&spec, &centers).unwrap();
            let kc = kk.matvec(&coeff);
            let alt_norm: f64 = coeff.iter().zip(&kc).map(|(a, b)| a * b).sum();
            assert!(
                f.norm_sq() <= alt_norm + 1e-9 * alt_norm.abs().max(1.0),
                "alternative interpolant had smaller norm: {} < {}",
                alt_norm,
                f.norm_sq()
            );
        }
    }

    #[test]
    fn shared_factorization_matches_independent_fits() {
        let spec = gaussian(0.2);
        let a = random_instance(12, 31);
        let mut bvals: Vec<f64> = a.values().iter().map(|v| -v / 2.0).collect();
        bvals[0] = 0.9;
        let b = SampleSet::new(a.points().to_vec(), bvals).unwrap();
        let joint = fit_channels(spec, vec![a.clone(), b.clone()], 0.0).unwrap();
        let solo_a = fit(spec, a, 0.0).unwrap();
        let solo_b = fit(spec, b, 0.0).unwrap();
        assert_eq!(joint[0].alpha(), solo_a.alpha());
        assert_eq!(joint[1].alpha(), solo_b.alpha());
        assert!(Arc::ptr_eq(&joint[0].factor, &joint[1].factor));
    }

    #[test]
    fn fit_channels_rejects_mismatched_geometry() {
        let spec = gaussian(0.2);
        let a = random_instance(5, 40);
        let b = random_instance(5, 41);
        assert!(matches!(
            fit_channels(spec, vec![a, b], 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn doubling_values_doubles_alpha_and_quadruples_norm(seed in 0u64..500) {
            let s = random_instance(8, seed);
            let halved: Vec<f64> = s.values().iter().map(|v| v / 2.0).collect();
            let h = SampleSet::new(s.points().to_vec(), halved).unwrap();
            let spec = gaussian(0.25);
            let f1 = fit(spec, h, 0.0).unwrap();
            let f2 = fit(spec, s, 0.0).unwrap();
            for (a1, a2) in f1.alpha().iter().zip(f2.alpha()) {
                prop_assert!((2.0 * a1 - a2).abs() <= 1e-12 * a2.abs().max(1e-12));
            }
            prop_assert!(
                (4.0 * f1.norm_sq() - f2.norm_sq()).abs()
                    <= 1e-12 * f2.norm_sq().max(1e-12)
            );
        }
    }
}
