//! `gki`: band-limited image inpainting and super-resolution with per-pixel
//! confidence bands. Configuration merges three layers: built-in defaults,
//! then an optional `--config` file, then command-line flags.

mod artifacts;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::commands::bench::Suite;
use crate::config::{parse_config_file, KappaModeArg, KernelKind, Overrides, RunConfig};
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "gki",
    version,
    about = "Image inpainting and super-resolution by minimum-norm kernel \
             interpolation, with simultaneous per-pixel confidence bands"
)]
struct Cli {
    /// Plain `key = value` config file; keys match flag names, flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: FlagOverrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FlagOverrides {
    /// Kernel family used for fitting.
    #[arg(long, global = true, value_enum)]
    kernel: Option<KernelKind>,

    /// Band limit of the pw kernel (rad per unit coordinate).
    #[arg(long, global = true)]
    eta: Option<f64>,

    /// Width of the gauss kernel.
    #[arg(long, global = true)]
    sigma: Option<f64>,

    /// Failure probability of the confidence bands (e.g. 0.1 for 90%).
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Where the norm bound comes from.
    #[arg(long, global = true, value_enum)]
    kappa_mode: Option<KappaModeArg>,

    /// Squared-norm bound for `--kappa-mode manual`.
    #[arg(long, global = true)]
    kappa: Option<f64>,

    /// Scale the bound by the extended problem size (far more conservative;
    /// much wider bands).
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    literal_alg1: bool,

    /// Allowance added to the estimated bound for quantization error.
    #[arg(long, global = true)]
    delta0: Option<f64>,

    /// Allowance added to the estimated bound for out-of-model energy.
    #[arg(long, global = true)]
    delta_r: Option<f64>,

    /// Ridge added to the Gram diagonal before factorization.
    #[arg(long, global = true)]
    jitter: Option<f64>,

    /// Master seed; all randomness derives from it deterministically.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for banding (0 = all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Upscaling factor for superres.
    #[arg(long, global = true)]
    scale: Option<usize>,

    /// Abort on the first failed query instead of enumerating failures.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    strict: bool,

    /// Also write classical upsampler outputs next to the superres result.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    baselines: bool,

    /// Observation mask (NetPBM, 0 = missing, nonzero = observed).
    #[arg(long, global = true, value_name = "PATH")]
    mask: Option<PathBuf>,

    /// Directory all artifacts are written into.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

impl FlagOverrides {
    fn into_overrides(self) -> Overrides {
        Overrides {
            kernel: self.kernel,
            eta: self.eta,
            sigma: self.sigma,
            gamma: self.gamma,
            kappa_mode: self.kappa_mode,
            kappa: self.kappa,
            literal_alg1: self.literal_alg1.then_some(true),
            delta0: self.delta0,
            delta_r: self.delta_r,
            jitter: self.jitter,
            seed: self.seed,
            threads: self.threads,
            scale: self.scale,
            strict: self.strict.then_some(true),
            baselines: self.baselines.then_some(true),
            mask: self.mask,
            out_dir: self.out_dir,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic band-limited test images with exact ground truth.
    Synth {
        /// How many images to generate.
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Image side length (images are r x r).
        #[arg(long, default_value_t = 50)]
        r: usize,
    },
    /// Fill the masked-out pixels of IMAGE and band every estimate.
    Inpaint { image: PathBuf },
    /// Upscale IMAGE by --scale and band every interpolated pixel.
    Superres { image: PathBuf },
    /// Compare CANDIDATE against REFERENCE (MSE, PSNR, SSIM, NRMSE).
    Metrics {
        reference: PathBuf,
        candidate: PathBuf,
        /// Compute on normalized [-1, 1] values with this peak instead of
        /// the raw 8-bit scale.
        #[arg(long)]
        metric_scale: Option<f64>,
    },
    /// Run a reproducible synthetic benchmark suite.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Images per configuration (suite-specific default).
        #[arg(long)]
        count: Option<usize>,
        /// Grid side length (suite-specific default).
        #[arg(long)]
        r: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        parse_config_file(path)?.apply(&mut cfg);
    }
    cli.flags.into_overrides().apply(&mut cfg);

    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Synth { count, r } => commands::synth::run(&cfg, count, r),
        Command::Inpaint { image } => commands::inpaint::run(&cfg, &image),
        Command::Superres { image } => commands::superres::run(&cfg, &image),
        Command::Metrics { reference, candidate, metric_scale } => {
            commands::metrics::run(&cfg, &reference, &candidate, metric_scale)
        }
        Command::Bench { suite, count, r } => commands::bench::run(&cfg, suite, count, r),
    }
}
