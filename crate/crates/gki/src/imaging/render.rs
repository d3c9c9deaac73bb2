//! Diagnostic renderings: grayscale certainty maps from confidence bands and
//! signed interpolation-weight maps from a fitted interpolant.

use crate::error::{Error, Result};
use crate::imaging::{Mask, RawImage};
use crate::interp::Interpolant;
use crate::uq::ConfidenceBand;

/// Floor for the per-channel normalizing width; keeps an all-degenerate band
/// rendering as fully certain instead of dividing by zero.
const WIDTH_FLOOR: f64 = 1e-12;

/// Luminance weights for collapsing three certainty channels to one plane.
/// The blue weight (0.11) is written as the residual so the three weights sum
/// to exactly 1.0 and identical channels combine to the channel value.
const LUMA: [f64; 3] = [0.3, 0.59, 1.0 - (0.3 + 0.59)];

/// Renders per-pixel certainty u = 1 - (width / U_max)^(1/4), where U_max is
/// the largest interval width within the same channel. Observed pixels (not
/// queried) render fully certain; failed queries render fully uncertain.
/// Three channels are combined by luminance weights, one passes through.
pub fn render_uncertainty(
    bands: &[ConfidenceBand],
    query_pixels: &[(usize, usize)],
    h: usize,
    w: usize,
) -> Result<RawImage> {
    if bands.is_empty() {
        return Err(Error::NoData);
    }
    if bands.len() != 1 && bands.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "certainty maps support 1 or 3 channels, got {}",
            bands.len()
        )));
    }
    for band in bands {
        if band.results.len() != query_pixels.len() {
            return Err(Error::ShapeMismatch(format!(
                "band for channel {} has {} results but there are {} query pixels",
                band.channel,
                band.results.len(),
                query_pixels.len()
            )));
        }
    }
    for &(r, c) in query_pixels {
        if r >= h || c >= w {
            return Err(Error::InvalidArgument(format!(
                "query pixel ({r}, {c}) outside {h}x{w} image"
            )));
        }
    }

    let u_max: Vec<f64> = bands
        .iter()
        .map(|band| {
            band.intervals()
                .fold(0.0f64, |m, iv| m.max(iv.width()))
                .max(WIDTH_FLOOR)
        })
        .collect();

    let mut certainty = vec![1.0f64; h * w];
    for (q, &(r, c)) in query_pixels.iter().enumerate() {
        let mut u = 0.0;
        for (ch, band) in bands.iter().enumerate() {
            let weight = if bands.len() == 3 { LUMA[ch] } else { 1.0 };
            let per_channel = match &band.results[q] {
                Ok(iv) => 1.0 - (iv.width() / u_max[ch]).powf(0.25),
                Err(_) => 0.0,
            };
            u += weight * per_channel;
        }
        certainty[r * w + c] = u.clamp(0.0, 1.0);
    }

    let data = certainty.iter().map(|&u| (u * 255.0).round() as u8).collect();
    RawImage::new(h, w, 1, 255, data)
}

/// Renders the interpolation weights as grayscale: each weight is rescaled by
/// the largest magnitude, passed through the sign-preserving power
/// sign(a)*|a|^exponent, and mapped from [-1, 1] to [0, 255]. Unobserved
/// pixels take the neutral midpoint value.
pub fn render_weights(
    interp: &Interpolant,
    mask: &Mask,
    h: usize,
    w: usize,
    exponent: f64,
) -> Result<RawImage> {
    if mask.h() != h || mask.w() != w {
        return Err(Error::ShapeMismatch(format!(
            "mask is {}x{} but target image is {h}x{w}",
            mask.h(),
            mask.w()
        )));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "weight exponent must be a positive finite number, got {exponent}"
        )));
    }
    let alpha = interp.alpha();
    if alpha.len() != mask.observed_count() {
        return Err(Error::ShapeMismatch(format!(
            "interpolant has {} weights but mask observes {} pixels",
            alpha.len(),
            mask.observed_count()
        )));
    }

    let peak = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));

    let mut data = vec![128u8; h * w];
    let mut next = 0usize;
    for r in 0..h {
        for c in 0..w {
            if !mask.is_observed(r, c) {
                continue;
            }
            let a = alpha[next];
            next += 1;
            let t = if peak == 0.0 {
                0.0
            } else {
                (a / peak).abs().powf(exponent).copysign(a)
            };
            data[r * w + c] = ((t + 1.0) * 127.5).round() as u8;
        }
    }
    RawImage::new(h, w, 1, 255, data)
}
