//! Command implementations. `band_pipeline` is the shared core of
//! `inpaint` and `superres`: fit per channel, band the missing pixels,
//! render every artifact, and tabulate per-pixel intervals.

pub mod bench;
pub mod inpaint;
pub mod metrics;
pub mod superres;
pub mod synth;

use std::path::Path;

use gki::imaging::{denormalize, render_uncertainty, render_weights, split_observed, Mask, NormImage};
use gki::interp::SampleSet;
use gki::uq::multichannel_band;

use crate::artifacts::{fmt_f64, write_image, Table};
use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Contrast exponent for the weight maps; quarter-power spreads the usually
/// heavy-tailed coefficients over the gray range.
const WEIGHT_EXPONENT: f64 = 0.25;

/// Attaches the path to a library I/O failure, which the library's clonable
/// error type drops; other library errors pass through unchanged.
pub fn read_tagged<T>(path: &Path, result: gki::Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        gki::Error::Io(msg) => CliError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(msg),
        },
        other => CliError::Lib(other),
    })
}

pub struct BandOutcome {
    /// (row, col, channel, error text) for queries that could not be banded.
    pub failures: Vec<(usize, usize, usize, String)>,
    pub total_queries: usize,
}

/// Runs the full banding pipeline on an observed image and writes all
/// artifacts into `out`: estimate/lower/upper images (band endpoints are
/// clamped by the 8-bit render), an uncertainty heatmap, per-channel weight
/// maps, and the per-pixel interval table.
pub fn band_pipeline(
    cfg: &RunConfig,
    norm: &NormImage,
    mask: &Mask,
    out: &Path,
) -> Result<BandOutcome> {
    let (h, w) = (norm.h(), norm.w());
    let mut channels: Vec<SampleSet> = Vec::with_capacity(norm.channels());
    let mut queries = Vec::new();
    let mut query_pixels = Vec::new();
    for ch in 0..norm.channels() {
        let (samples, q, qp) = split_observed(norm, mask, ch)?;
        channels.push(samples);
        if ch == 0 {
            queries = q;
            query_pixels = qp;
        }
    }

    let run = multichannel_band(
        cfg.spec()?,
        channels,
        &cfg.kappa_source()?,
        &queries,
        cfg.jitter,
        cfg.strict,
    )?;
    for (ch, floored) in run.floored.iter().enumerate() {
        if *floored {
            eprintln!(
                "warning: channel {ch}: norm bound fell below the fitted norm; \
                 its band collapses to the point estimate"
            );
        }
    }

    // Fill estimates and band endpoints; failed queries pass the input
    // value through and are reported at the end.
    let mut estimate = norm.clone();
    let mut lower = norm.clone();
    let mut upper = norm.clone();
    let mut failures = Vec::new();
    for (ch, band) in run.bands.iter().enumerate() {
        for (res, (r, c)) in band.results.iter().zip(&query_pixels) {
            match res {
                Ok(interval) => {
                    estimate.set(*r, *c, ch, interval.estimate);
                    lower.set(*r, *c, ch, interval.lower);
                    upper.set(*r, *c, ch, interval.upper);
                }
                Err(e) => failures.push((*r, *c, ch, e.to_string())),
            }
        }
    }

    let mut written = vec![
        write_image(out, "estimate", &denormalize(&estimate, 255, true)?)?,
        write_image(out, "lower", &denormalize(&lower, 255, true)?)?,
        write_image(out, "upper", &denormalize(&upper, 255, true)?)?,
        write_image(out, "uncertainty", &render_uncertainty(&run.bands, &query_pixels, h, w)?)?,
    ];
    for (ch, interp) in run.interpolants.iter().enumerate() {
        let map = render_weights(interp, mask, h, w, WEIGHT_EXPONENT)?;
        let stem = if run.interpolants.len() == 1 {
            "weights".to_string()
        } else {
            format!("weights_c{ch}")
        };
        written.push(write_image(out, &stem, &map)?);
    }

    let mut table = Table::new(
        "bands",
        &["i", "j", "channel", "estimate", "lower", "upper", "width"],
    );
    for (k, (r, c)) in query_pixels.iter().enumerate() {
        for (ch, band) in run.bands.iter().enumerate() {
            let mut row = vec![r.to_string(), c.to_string(), ch.to_string()];
            match &band.results[k] {
                Ok(iv) => row.extend([
                    fmt_f64(iv.estimate),
                    fmt_f64(iv.lower),
                    fmt_f64(iv.upper),
                    fmt_f64(iv.width()),
                ]),
                Err(_) => row.extend([String::new(), String::new(), String::new(), String::new()]),
            }
            table.push_row(row);
        }
    }
    let (csv, md) = table.write(out)?;
    written.push(csv);
    written.push(md);

    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(BandOutcome { failures, total_queries: queries.len() * norm.channels() })
}

/// Converts query failures into the partial-failure exit path after
/// enumerating them on stderr.
pub fn finish(outcome: BandOutcome) -> Result<()> {
    if outcome.failures.is_empty() {
        return Ok(());
    }
    for (r, c, ch, err) in &outcome.failures {
        eprintln!("query failed: pixel ({r}, {c}) channel {ch}: {err}");
    }
    Err(CliError::PartialBand {
        failed: outcome.failures.len(),
        total: outcome.total_queries,
    })
}
