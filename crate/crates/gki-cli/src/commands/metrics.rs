//! `metrics`: compare two images. Default works on the raw 8-bit scale;
//! `--metric-scale` recomputes on normalized [-1, 1] values with the given
//! peak (1.0 matches how the synthetic benchmarks are scored).

use std::path::Path;

use gki::imaging::{normalize, read_netpbm};
use gki::metrics::{report, report_values, MetricReport};

use crate::artifacts::{fmt_f64, Table};
use crate::commands::read_tagged;
use crate::config::RunConfig;
use crate::error::{io_err, Result};

pub fn run(
    cfg: &RunConfig,
    reference: &Path,
    candidate: &Path,
    metric_scale: Option<f64>,
) -> Result<()> {
    let a = read_tagged(reference, read_netpbm(reference))?;
    let b = read_tagged(candidate, read_netpbm(candidate))?;
    let rep: MetricReport = match metric_scale {
        Some(scale) => report_values(normalize(&a).data(), normalize(&b).data(), scale)?,
        None => report(&a, &b)?,
    };

    println!("mse {}", rep.mse);
    println!("psnr {}", rep.psnr);
    println!("ssim {}", rep.ssim);
    println!("nrmse {}", rep.nrmse);
    println!("scale {}", rep.scale);

    if let Some(out) = &cfg.out_dir {
        std::fs::create_dir_all(out).map_err(io_err(out))?;
        let mut table = Table::new(
            "metrics",
            &["reference", "candidate", "mse", "psnr", "ssim", "nrmse", "scale"],
        );
        table.push_row(vec![
            reference.display().to_string(),
            candidate.display().to_string(),
            fmt_f64(rep.mse),
            fmt_f64(rep.psnr),
            fmt_f64(rep.ssim),
            fmt_f64(rep.nrmse),
            fmt_f64(rep.scale),
        ]);
        let (csv, md) = table.write(out)?;
        println!("wrote {}", csv.display());
        println!("wrote {}", md.display());
    }
    Ok(())
}
