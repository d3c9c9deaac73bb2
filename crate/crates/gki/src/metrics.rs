//! Whole-image quality metrics: MSE, PSNR, a single-window global SSIM, and
//! NRMSE. Defaults operate on the raw 8-bit scale; the `*_values` variants
//! accept any value range with an explicit scale.

use crate::error::{Error, Result};
use crate::imaging::RawImage;

/// Peak signal and luminance range of 8-bit images.
pub const RAW_SCALE: f64 = 255.0;
/// Default SSIM stabilizer coefficients; c1 = (k1*L)^2, c2 = (k2*L)^2.
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// All four metrics for one image pair plus the scale they were computed on.
/// `psnr` is `f64::INFINITY` for identical images; `nrmse` and `mse` are zero
/// exactly when the images are identical.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub nrmse: f64,
    pub scale: f64,
}

fn check_values(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::NoData);
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

fn check_images(a: &RawImage, b: &RawImage) -> Result<()> {
    if a.h() != b.h() || a.w() != b.w() || a.channels() != b.channels() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.h(),
            a.w(),
            a.channels(),
            b.h(),
            b.w(),
            b.channels()
        )));
    }
    Ok(())
}

fn to_values(image: &RawImage) -> Vec<f64> {
    image.data().iter().map(|&v| v as f64).collect()
}

/// Mean squared error over all entries (multichannel entries count
/// individually, so the result is one number per image pair).
pub fn mse_values(a: &[f64], b: &[f64]) -> Result<f64> {
    check_values(a, b)?;
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// Peak signal-to-noise ratio 10*log10(peak^2 / mse) in dB; identical inputs
/// yield `f64::INFINITY`.
pub fn psnr_values(a: &[f64], b: &[f64], peak: f64) -> Result<f64> {
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "peak must be a positive finite number, got {peak}"
        )));
    }
    let m = mse_values(a, b)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / m).log10())
}

/// Global single-window SSIM using whole-image means, population variances
/// (divisor n), and covariance. Symmetric in its arguments and exactly 1 on
/// identical inputs.
pub fn ssim_values(a: &[f64], b: &[f64], range: f64, k1: f64, k2: f64) -> Result<f64> {
    check_values(a, b)?;
    if !(range > 0.0 && range.is_finite()) || k1 <= 0.0 || k2 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "SSIM needs positive range and coefficients, got range {range}, k1 {k1}, k2 {k2}"
        )));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut cov = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        var_a += da * da;
        var_b += db * db;
        cov += da * db;
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    let c1 = (k1 * range) * (k1 * range);
    let c2 = (k2 * range) * (k2 * range);
    let num = (2.0 * mean_a * mean_b + c1) * (2.0 * cov + c2);
    let den = (mean_a * mean_a + mean_b * mean_b + c1) * (var_a + var_b + c2);
    Ok(num / den)
}

/// Normalized root mean squared error ||A - B||_F / ||A||_F. Asymmetric: `a`
/// is the reference and must be nonzero.
pub fn nrmse_values(a: &[f64], b: &[f64]) -> Result<f64> {
    check_values(a, b)?;
    let diff_sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let ref_sq: f64 = a.iter().map(|x| x * x).sum();
    if ref_sq == 0.0 {
        return Err(Error::InvalidArgument(
            "NRMSE reference image has zero norm".to_string(),
        ));
    }
    Ok(diff_sq.sqrt() / ref_sq.sqrt())
}

/// MSE between two equally-shaped raw images on the [0, 255] scale.
pub fn mse(a: &RawImage, b: &RawImage) -> Result<f64> {
    check_images(a, b)?;
    mse_values(&to_values(a), &to_values(b))
}

/// PSNR between two raw images with peak 255.
pub fn psnr(a: &RawImage, b: &RawImage) -> Result<f64> {
    check_images(a, b)?;
    psnr_values(&to_values(a), &to_values(b), RAW_SCALE)
}

/// Global SSIM between two raw images with luminance range 255 and default
/// stabilizers.
pub fn ssim(a: &RawImage, b: &RawImage) -> Result<f64> {
    check_images(a, b)?;
    ssim_values(&to_values(a), &to_values(b), RAW_SCALE, SSIM_K1, SSIM_K2)
}

/// NRMSE between two raw images; `a` is the reference.
pub fn nrmse(a: &RawImage, b: &RawImage) -> Result<f64> {
    check_images(a, b)?;
    nrmse_values(&to_values(a), &to_values(b))
}

/// All four metrics between two raw images on the 8-bit scale.
pub fn report(a: &RawImage, b: &RawImage) -> Result<MetricReport> {
    check_images(a, b)?;
    report_values(&to_values(a), &to_values(b), RAW_SCALE)
}

/// All four metrics over value slices with an explicit scale (peak and
/// luminance range), recorded in the report.
pub fn report_values(a: &[f64], b: &[f64], scale: f64) -> Result<MetricReport> {
    Ok(MetricReport {
        mse: mse_values(a, b)?,
        psnr: psnr_values(a, b, scale)?,
        ssim: ssim_values(a, b, scale, SSIM_K1, SSIM_K2)?,
        nrmse: nrmse_values(a, b)?,
        scale,
    })
}
