//! `inpaint`: fill the masked-out pixels of an image and band every fill.

use std::path::Path;

use gki::imaging::{normalize, read_mask, read_netpbm};

use crate::commands::{band_pipeline, finish, read_tagged};
use crate::config::RunConfig;
use crate::error::Result;

pub fn run(cfg: &RunConfig, image: &Path) -> Result<()> {
    let out = cfg.out_dir()?;
    let raw = read_tagged(image, read_netpbm(image))?;
    let mask_path = cfg.mask_path()?;
    let mask = read_tagged(mask_path, read_mask(mask_path))?;
    let norm = normalize(&raw);
    let outcome = band_pipeline(cfg, &norm, &mask, out)?;
    finish(outcome)
}
