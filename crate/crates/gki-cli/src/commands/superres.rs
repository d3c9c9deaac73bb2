//! `superres`: upscale an image by an integer factor. Low-resolution pixel
//! (i, j) is pinned to fine-grid pixel (i*scale, j*scale); that placement is
//! exactly inverse to stride-`scale` decimation of the fine grid, so
//! downsampling a reconstruction reproduces the input bit-for-bit.

use std::path::Path;

use gki::baselines::{upsample_bicubic, upsample_bilinear, upsample_nearest};
use gki::imaging::{normalize, read_netpbm, Mask, NormImage};

use crate::artifacts::write_image;
use crate::commands::{band_pipeline, finish, read_tagged};
use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub fn run(cfg: &RunConfig, image: &Path) -> Result<()> {
    let out = cfg.out_dir()?;
    let scale = cfg.scale;
    if scale < 2 {
        return Err(CliError::Config(format!("--scale must be >= 2, got {scale}")));
    }
    if scale != 2 && scale != 4 {
        eprintln!("warning: scale {scale} is untested; 2 and 4 are the validated factors");
    }

    let low = read_tagged(image, read_netpbm(image))?;
    let low_norm = normalize(&low);
    let (h, w) = (low.h() * scale, low.w() * scale);

    let mut observed = NormImage::new(h, w, low.channels(), vec![0.0; h * w * low.channels()])?;
    let mut mask_data = vec![false; h * w];
    for r in 0..low.h() {
        for c in 0..low.w() {
            mask_data[r * scale * w + c * scale] = true;
            for ch in 0..low.channels() {
                observed.set(r * scale, c * scale, ch, low_norm.get(r, c, ch));
            }
        }
    }
    let mask = Mask::new(h, w, mask_data)?;

    let outcome = band_pipeline(cfg, &observed, &mask, out)?;

    if cfg.baselines {
        for (stem, up) in [
            ("baseline_nearest", upsample_nearest(&low, scale)?),
            ("baseline_bilinear", upsample_bilinear(&low, scale)?),
            ("baseline_bicubic", upsample_bicubic(&low, scale)?),
        ] {
            let path = write_image(out, stem, &up)?;
            println!("wrote {}", path.display());
        }
    }

    finish(outcome)
}
