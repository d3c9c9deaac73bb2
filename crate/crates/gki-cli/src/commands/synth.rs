//! `synth`: generate band-limited test images with exact ground truth.

use gki::imaging::{denormalize, derive_seed, synth_pw_image};

use crate::artifacts::write_image;
use crate::commands::read_tagged;
use crate::config::RunConfig;
use crate::error::{io_err, Result};

/// Knot count per image; enough structure to be interesting, few enough that
/// the truth sidecar stays small.
const KNOTS: usize = 20;

/// Seed stream reserved for image generation, so other commands drawing from
/// the same master seed stay decorrelated.
const STREAM: u64 = 1;

pub fn run(cfg: &RunConfig, count: usize, r: usize) -> Result<()> {
    let out = cfg.out_dir()?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    for i in 0..count {
        let seed = derive_seed(cfg.seed, STREAM, i as u64);
        let (img, truth) = synth_pw_image(cfg.eta, r, KNOTS, seed)?;
        let raw = denormalize(&img, 255, true)?;
        let img_path = write_image(out, &format!("synth_{i:03}"), &raw)?;
        let truth_path = out.join(format!("synth_{i:03}.truth.txt"));
        read_tagged(&truth_path, truth.save(&truth_path))?;
        println!("wrote {}", img_path.display());
        println!("wrote {}", truth_path.display());
    }
    Ok(())
}
