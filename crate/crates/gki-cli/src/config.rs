//! Run configuration: defaults, config-file entries, and flag precedence
//! (flags beat file entries, file entries beat defaults).

use std::fs;
use std::path::{Path, PathBuf};

use gki::kernel::KernelSpec;
use gki::uq::KappaSource;

use crate::error::{io_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    /// Band-limited (sinc product) kernel with band limit `eta`.
    Pw,
    /// Gaussian kernel with width `sigma`.
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KappaModeArg {
    /// Estimate the norm bound from the observed values (band-limited
    /// kernel only).
    EstimatePw,
    /// Use the bound supplied with `--kappa`.
    Manual,
    /// No bound: zero-width bands at the fitted norm.
    NormFloor,
}

/// Hyper-parameters and paths shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kernel: KernelKind,
    pub eta: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub kappa_mode: KappaModeArg,
    pub kappa: Option<f64>,
    pub literal_alg1: bool,
    pub delta0: f64,
    pub delta_r: f64,
    pub jitter: f64,
    pub seed: u64,
    pub threads: usize,
    pub scale: usize,
    pub strict: bool,
    pub baselines: bool,
    pub mask: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: KernelKind::Pw,
            eta: 50.0,
            sigma: 0.05,
            gamma: 0.1,
            kappa_mode: KappaModeArg::EstimatePw,
            kappa: None,
            literal_alg1: false,
            delta0: 0.0,
            delta_r: 0.0,
            jitter: 1e-6,
            seed: 0xA11CE,
            threads: 0,
            scale: 2,
            strict: false,
            baselines: false,
            mask: None,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn spec(&self) -> Result<KernelSpec> {
        let spec = match self.kernel {
            KernelKind::Pw => KernelSpec::paley_wiener(self.eta, 2)?,
            KernelKind::Gauss => KernelSpec::gaussian(self.sigma, 2)?,
        };
        Ok(spec)
    }

    /// The per-channel norm-bound policy, validated against the kernel:
    /// the sample-based estimate is only sound for band-limited kernels,
    /// and manual mode needs an actual bound.
    pub fn kappa_source(&self) -> Result<KappaSource> {
        match self.kappa_mode {
            KappaModeArg::EstimatePw => {
                if self.kernel != KernelKind::Pw {
                    return Err(CliError::Config(
                        "kappa-mode estimate-pw requires the pw kernel; \
                         pass --kappa-mode manual --kappa <bound> for gauss"
                            .into(),
                    ));
                }
                Ok(KappaSource::EstimatePw {
                    gamma: self.gamma,
                    delta0: self.delta0,
                    delta_r: self.delta_r,
                    literal_alg1: self.literal_alg1,
                })
            }
            KappaModeArg::Manual => match self.kappa {
                Some(kappa) => Ok(KappaSource::Manual {
                    kappa,
                    gamma: self.gamma,
                    literal_alg1: self.literal_alg1,
                }),
                None => Err(CliError::Config(
                    "kappa-mode manual requires --kappa <bound>".into(),
                )),
            },
            KappaModeArg::NormFloor => Ok(KappaSource::NormFloor { gamma: self.gamma }),
        }
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.mask_like(&self.out_dir, "--out-dir is required for this command")
    }

    pub fn mask_path(&self) -> Result<&Path> {
        self.mask_like(&self.mask, "--mask is required for this command")
    }

    fn mask_like<'a>(&self, field: &'a Option<PathBuf>, msg: &str) -> Result<&'a Path> {
        field.as_deref().ok_or_else(|| CliError::Config(msg.into()))
    }
}

/// Partial configuration collected from one source; `None` means "not set
/// by this source".
#[derive(Debug, Default)]
pub struct Overrides {
    pub kernel: Option<KernelKind>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa_mode: Option<KappaModeArg>,
    pub kappa: Option<f64>,
    pub literal_alg1: Option<bool>,
    pub delta0: Option<f64>,
    pub delta_r: Option<f64>,
    pub jitter: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub scale: Option<usize>,
    pub strict: Option<bool>,
    pub baselines: Option<bool>,
    pub mask: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        set!(kernel, eta, sigma, gamma, kappa_mode, literal_alg1, delta0, delta_r);
        set!(jitter, seed, threads, scale, strict, baselines);
        if self.kappa.is_some() {
            cfg.kappa = self.kappa;
        }
        if self.mask.is_some() {
            cfg.mask = self.mask;
        }
        if self.out_dir.is_some() {
            cfg.out_dir = self.out_dir;
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| {
        CliError::Config(format!("line {line}: invalid value {value:?} for key {key:?}"))
    })
}

fn parse_choice(key: &str, value: &str, line: usize, choices: &[&str]) -> Result<usize> {
    choices.iter().position(|c| *c == value).ok_or_else(|| {
        CliError::Config(format!(
            "line {line}: key {key:?} must be one of {choices:?}, got {value:?}"
        ))
    })
}

/// Parses a plain `key = value` config file (`#` starts a comment).
/// Keys match the command-line flag names.
pub fn parse_config_file(path: &Path) -> Result<Overrides> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut o = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line}: expected `key = value`, got {content:?}"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "kernel" => {
                o.kernel = Some(match parse_choice(key, value, line, &["pw", "gauss"])? {
                    0 => KernelKind::Pw,
                    _ => KernelKind::Gauss,
                })
            }
            "kappa-mode" => {
                let modes = ["estimate-pw", "manual", "norm-floor"];
                o.kappa_mode = Some(match parse_choice(key, value, line, &modes)? {
                    0 => KappaModeArg::EstimatePw,
                    1 => KappaModeArg::Manual,
                    _ => KappaModeArg::NormFloor,
                })
            }
            "eta" => o.eta = Some(parse(key, value, line)?),
            "sigma" => o.sigma = Some(parse(key, value, line)?),
            "gamma" => o.gamma = Some(parse(key, value, line)?),
            "kappa" => o.kappa = Some(parse(key, value, line)?),
            "literal-alg1" => o.literal_alg1 = Some(parse(key, value, line)?),
            "delta0" => o.delta0 = Some(parse(key, value, line)?),
            "delta-r" => o.delta_r = Some(parse(key, value, line)?),
            "jitter" => o.jitter = Some(parse(key, value, line)?),
            "seed" => o.seed = Some(parse(key, value, line)?),
            "threads" => o.threads = Some(parse(key, value, line)?),
            "scale" => o.scale = Some(parse(key, value, line)?),
            "strict" => o.strict = Some(parse(key, value, line)?),
            "baselines" => o.baselines = Some(parse(key, value, line)?),
            "mask" => o.mask = Some(PathBuf::from(value)),
            "out-dir" => o.out_dir = Some(PathBuf::from(value)),
            other => {
                return Err(CliError::Config(format!("line {line}: unknown key {other:?}")))
            }
        }
    }
    Ok(o)
}
