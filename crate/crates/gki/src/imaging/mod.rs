//! Image containers, pixel-grid encoding, masks, and synthetic data.
//!
//! Pixels live on a regular grid mapped strictly inside the unit square:
//! 1-based pixel `(i, j)` of an `h x w` image sits at `(i/(h+1), j/(w+1))`.
//! Raw 8-bit intensities map affinely onto `[-1, 1]` and back. Masks mark
//! observed pixels; unobserved pixels become band queries.

mod netpbm;
mod render;
mod synth;

pub use netpbm::{read_mask, read_netpbm, write_mask, write_netpbm, write_netpbm_ascii};
pub use render::{render_uncertainty, render_weights};
pub use synth::{synth_pw_image, SyntheticTruth};

use crate::error::{Error, Result};
use crate::interp::SampleSet;

/// 8-bit image, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    h: usize,
    w: usize,
    channels: usize,
    maxval: u8,
    data: Vec<u8>,
}

impl RawImage {
    pub fn new(h: usize, w: usize, channels: usize, maxval: u8, data: Vec<u8>) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::InvalidArgument("image dimensions must be positive".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if maxval == 0 {
            return Err(Error::InvalidArgument("maxval must be positive".into()));
        }
        if data.len() != h * w * channels {
            return Err(Error::ShapeMismatch(format!(
                "expected {} bytes for {h}x{w}x{channels}, got {}",
                h * w * channels,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|&v| v > maxval) {
            return Err(Error::InvalidArgument(format!(
                "sample {bad} exceeds maxval {maxval}"
            )));
        }
        Ok(RawImage { h, w, channels, maxval, data })
    }

    pub fn constant(h: usize, w: usize, channels: usize, value: u8) -> Result<Self> {
        RawImage::new(h, w, channels, 255, vec![value; h * w * channels])
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn maxval(&self) -> u8 {
        self.maxval
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize, ch: usize) -> u8 {
        self.data[(r * self.w + c) * self.channels + ch]
    }

    /// One channel as `f64`, row-major.
    pub fn channel_plane(&self, ch: usize) -> Vec<f64> {
        (0..self.h * self.w)
            .map(|i| self.data[i * self.channels + ch] as f64)
            .collect()
    }
}

/// Real-valued image on the `[-1, 1]` intensity scale, row-major,
/// channels interleaved. Band renderings may carry values slightly outside
/// the nominal range; conversion back to 8-bit decides whether to clamp.
#[derive(Debug, Clone, PartialEq)]
pub struct NormImage {
    h: usize,
    w: usize,
    channels: usize,
    data: Vec<f64>,
}

impl NormImage {
    pub fn new(h: usize, w: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::InvalidArgument("image dimensions must be positive".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != h * w * channels {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for {h}x{w}x{channels}, got {}",
                h * w * channels,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite intensity".into()));
        }
        Ok(NormImage { h, w, channels, data })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize, ch: usize) -> f64 {
        self.data[(r * self.w + c) * self.channels + ch]
    }

    pub fn set(&mut self, r: usize, c: usize, ch: usize, v: f64) {
        self.data[(r * self.w + c) * self.channels + ch] = v;
    }
}

/// Per-pixel observation mask; `true` marks an observed pixel.
///
/// An all-false mask is representable (for example a disk covering the whole
/// frame); consumers that need data fail with [`Error::NoData`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    h: usize,
    w: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(h: usize, w: usize, data: Vec<bool>) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::InvalidArgument("mask dimensions must be positive".into()));
        }
        if data.len() != h * w {
            return Err(Error::ShapeMismatch(format!(
                "expected {} mask entries for {h}x{w}, got {}",
                h * w,
                data.len()
            )));
        }
        Ok(Mask { h, w, data })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn is_observed(&self, r: usize, c: usize) -> bool {
        self.data[r * self.w + c]
    }

    pub fn observed_count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }
}

/// Deterministically mixes a master seed, a stream label, and an index into
/// one RNG seed, so corpus items get independent but reproducible streams.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
    splitmix64(splitmix64(master ^ splitmix64(stream)).wrapping_add(index))
}

/// Function-domain coordinates of every pixel of an `h x w` grid, row-major:
/// 1-based pixel `(i, j)` maps to `(i/(h+1), j/(w+1))`, strictly inside
/// `(0, 1)^2`.
pub fn grid_coords(h: usize, w: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(h * w);
    for i in 1..=h {
        for j in 1..=w {
            pts.push(vec![i as f64 / (h + 1) as f64, j as f64 / (w + 1) as f64]);
        }
    }
    pts
}

/// Splits one channel of a normalized image into observed samples and
/// unobserved queries, both in row-major order. Returns the samples, the
/// query coordinates, and the 0-based `(row, col)` index of each query.
pub fn split_observed(
    image: &NormImage,
    mask: &Mask,
    channel: usize,
) -> Result<(SampleSet, Vec<Vec<f64>>, Vec<(usize, usize)>)> {
    if image.h() != mask.h() || image.w() != mask.w() {
        return Err(Error::ShapeMismatch(format!(
            "image {}x{} vs mask {}x{}",
            image.h(),
            image.w(),
            mask.h(),
            mask.w()
        )));
    }
    if channel >= image.channels() {
        return Err(Error::InvalidArgument(format!(
            "channel {channel} out of range for {} channels",
            image.channels()
        )));
    }
    let coords = grid_coords(image.h(), image.w());
    let mut sample_pts = Vec::new();
    let mut sample_vals = Vec::new();
    let mut queries = Vec::new();
    let mut query_pixels = Vec::new();
    for r in 0..image.h() {
        for c in 0..image.w() {
            let idx = r * image.w() + c;
            if mask.is_observed(r, c) {
                sample_pts.push(coords[idx].clone());
                sample_vals.push(image.get(r, c, channel));
            } else {
                queries.push(coords[idx].clone());
                query_pixels.push((r, c));
            }
        }
    }
    if sample_pts.is_empty() {
        return Err(Error::NoData);
    }
    let samples = SampleSet::new(sample_pts, sample_vals)?;
    Ok((samples, queries, query_pixels))
}

/// Mask with exactly `round(fraction * h * w)` observed pixels drawn
/// uniformly without replacement from a seeded generator.
pub fn random_mask(h: usize, w: usize, fraction: f64, seed: u64) -> Result<Mask> {
    use rand::SeedableRng;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let total = h * w;
    let count = (fraction * total as f64).round() as usize;
    if count == 0 {
        return Err(Error::InvalidArgument(format!(
            "fraction {fraction} rounds to zero observed pixels on {h}x{w}"
        )));
    }
    let count = count.min(total);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![false; total];
    for idx in rand::seq::index::sample(&mut rng, total, count) {
        data[idx] = true;
    }
    Mask::new(h, w, data)
}

/// Mask hiding the pixels strictly inside a disk. `center` is in 1-based
/// pixel units `(row, col)`; a radius of 0 hides nothing.
pub fn circle_mask(h: usize, w: usize, center: (f64, f64), radius: f64) -> Mask {
    let r2 = radius * radius;
    let mut data = vec![true; h * w];
    for i in 1..=h {
        for j in 1..=w {
            let di = i as f64 - center.0;
            let dj = j as f64 - center.1;
            if di * di + dj * dj < r2 {
                data[(i - 1) * w + (j - 1)] = false;
            }
        }
    }
    Mask { h, w, data }
}

/// Keeps every `stride`-th pixel in every `stride`-th row, starting from the
/// first (1-based indices congruent to 1 modulo the stride).
pub fn subsample(image: &RawImage, stride: usize) -> Result<RawImage> {
    if stride < 2 {
        return Err(Error::InvalidArgument(format!("stride must be >= 2, got {stride}")));
    }
    if image.h() % stride != 0 || image.w() % stride != 0 {
        return Err(Error::InvalidArgument(format!(
            "dimensions {}x{} not divisible by stride {stride}",
            image.h(),
            image.w()
        )));
    }
    let (oh, ow) = (image.h() / stride, image.w() / stride);
    let mut data = Vec::with_capacity(oh * ow * image.channels());
    for r in (0..image.h()).step_by(stride) {
        for c in (0..image.w()).step_by(stride) {
            for ch in 0..image.channels() {
                data.push(image.get(r, c, ch));
            }
        }
    }
    RawImage::new(oh, ow, image.channels(), image.maxval(), data)
}

/// Maps raw intensities onto `[-1, 1]`: `v -> 2 v / maxval - 1`.
pub fn normalize(image: &RawImage) -> NormImage {
    let m = image.maxval() as f64;
    let data = image.data().iter().map(|&v| 2.0 * v as f64 / m - 1.0).collect();
    NormImage {
        h: image.h(),
        w: image.w(),
        channels: image.channels(),
        data,
    }
}

/// Inverse of [`normalize`] onto the given `maxval`: scales, optionally
/// clamps to the legal range, then rounds to the nearest integer. Without
/// clamping, an out-of-range value is an error.
pub fn denormalize(image: &NormImage, maxval: u8, clamp: bool) -> Result<RawImage> {
    let m = maxval as f64;
    let mut data = Vec::with_capacity(image.data().len());
    for (i, &v) in image.data().iter().enumerate() {
        let mut raw = (v + 1.0) * m / 2.0;
        if clamp {
            raw = raw.clamp(0.0, m);
        }
        let rounded = raw.round();
        if rounded < 0.0 || rounded > m {
            return Err(Error::InvalidArgument(format!(
                "normalized value {v} at index {i} maps outside [0, {maxval}]; \
                 pass clamp to clip"
            )));
        }
        data.push(rounded as u8);
    }
    RawImage::new(image.h(), image.w(), image.channels(), maxval, data)
}
