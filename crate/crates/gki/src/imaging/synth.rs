//! Synthetic band-limited ground truths and their sidecar files.
//!
//! A truth is a finite kernel expansion `f(x) = sum_k w_k k(x, knot_k)`
//! with knots drawn uniformly on the unit square and weights uniformly on
//! `[-1, 1]`, divided by its maximum absolute grid value when that exceeds
//! one. Keeping the truth next to the generated image lets coverage tests
//! evaluate it anywhere, not just at pixels.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::{grid_coords, NormImage};
use crate::kernel::KernelSpec;

/// A band-limited generating function with known structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTruth {
    spec: KernelSpec,
    knots: Vec<Vec<f64>>,
    weights: Vec<f64>,
    normalizer: f64,
}

impl SyntheticTruth {
    /// Assembles a truth from explicit parts (used by tests and by sidecar
    /// loading; generation goes through [`synth_pw_image`]).
    pub fn from_parts(
        eta: f64,
        knots: Vec<Vec<f64>>,
        weights: Vec<f64>,
        normalizer: f64,
    ) -> Result<Self> {
        let spec = KernelSpec::paley_wiener(eta, 2)?;
        if knots.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} knots vs {} weights",
                knots.len(),
                weights.len()
            )));
        }
        if knots.is_empty() {
            return Err(Error::InvalidArgument("need at least one knot".into()));
        }
        for k in &knots {
            if k.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: k.len() });
            }
        }
        if !(normalizer > 0.0) || !normalizer.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "normalizer must be positive and finite, got {normalizer}"
            )));
        }
        Ok(SyntheticTruth { spec, knots, weights, normalizer })
    }

    pub fn eta(&self) -> f64 {
        match self.spec.kind() {
            crate::kernel::KernelKind::PaleyWiener { eta } => eta,
            _ => unreachable!("synthetic truths are always band-limited"),
        }
    }

    pub fn knots(&self) -> &[Vec<f64>] {
        &self.knots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Evaluates the truth: `sum_k w_k k(x, knot_k) / normalizer`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.raw_eval(x) / self.normalizer
    }

    fn raw_eval(&self, x: &[f64]) -> f64 {
        self.knots
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| w * self.spec.eval_unchecked(x, k))
            .sum()
    }

    /// Writes the plain-text sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "gki-truth v1");
        let _ = writeln!(out, "eta {}", self.eta());
        let _ = writeln!(out, "normalizer {}", self.normalizer);
        let _ = writeln!(out, "knots {}", self.knots.len());
        for k in &self.knots {
            let _ = writeln!(out, "{} {}", k[0], k[1]);
        }
        let _ = writeln!(out, "weights {}", self.weights.len());
        for w in &self.weights {
            let _ = writeln!(out, "{w}");
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Reads a sidecar written by [`SyntheticTruth::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut parser = SidecarParser::new(path, &text);
        parser.expect_line("gki-truth v1")?;
        let eta = parser.keyed_f64("eta")?;
        let normalizer = parser.keyed_f64("normalizer")?;
        let n_knots = parser.keyed_usize("knots")?;
        let mut knots = Vec::with_capacity(n_knots);
        for _ in 0..n_knots {
            let (line, at) = parser.line()?;
            let mut it = line.split_whitespace();
            let x1 = parse_f64(it.next(), &parser, at)?;
            let x2 = parse_f64(it.next(), &parser, at)?;
            knots.push(vec![x1, x2]);
        }
        let n_weights = parser.keyed_usize("weights")?;
        let mut weights = Vec::with_capacity(n_weights);
        for _ in 0..n_weights {
            let (line, at) = parser.line()?;
            weights.push(parse_f64(Some(line.trim()), &parser, at)?);
        }
        SyntheticTruth::from_parts(eta, knots, weights, normalizer)
    }
}

struct SidecarParser<'a> {
    path: String,
    lines: std::str::Lines<'a>,
    offset: usize,
}

impl<'a> SidecarParser<'a> {
    fn new(path: &Path, text: &'a str) -> Self {
        SidecarParser { path: path.display().to_string(), lines: text.lines(), offset: 0 }
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), offset, message: message.into() }
    }

    fn line(&mut self) -> Result<(&'a str, usize)> {
        let at = self.offset;
        let line = self
            .lines
            .next()
            .ok_or_else(|| self.err(at, "unexpected end of file"))?;
        self.offset += line.len() + 1;
        Ok((line, at))
    }

    fn expect_line(&mut self, want: &str) -> Result<()> {
        let (line, at) = self.line()?;
        if line.trim() != want {
            return Err(self.err(at, format!("expected {want:?}, found {line:?}")));
        }
        Ok(())
    }

    fn keyed(&mut self, key: &str) -> Result<(&'a str, usize)> {
        let (line, at) = self.line()?;
        let rest = line
            .strip_prefix(key)
            .ok_or_else(|| self.err(at, format!("expected key {key:?}, found {line:?}")))?;
        Ok((rest.trim(), at))
    }

    fn keyed_f64(&mut self, key: &str) -> Result<f64> {
        let (v, at) = self.keyed(key)?;
        v.parse::<f64>()
            .map_err(|_| self.err(at, format!("invalid number {v:?} for {key}")))
    }

    fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let (v, at) = self.keyed(key)?;
        v.parse::<usize>()
            .map_err(|_| self.err(at, format!("invalid count {v:?} for {key}")))
    }
}

fn parse_f64(tok: Option<&str>, parser: &SidecarParser, at: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| parser.err(at, "missing number"))?;
    tok.parse::<f64>()
        .map_err(|_| parser.err(at, format!("invalid number {tok:?}")))
}

/// Draws a random band-limited truth and renders it on the `r x r` grid.
///
/// Knots come first from the seeded stream (two coordinates per knot), then
/// the weights. When the maximum absolute grid value exceeds 1 the whole
/// function is divided by it, so the image is always within `[-1, 1]`.
pub fn synth_pw_image(
    eta: f64,
    r: usize,
    n_knots: usize,
    seed: u64,
) -> Result<(NormImage, SyntheticTruth)> {
    if r == 0 {
        return Err(Error::InvalidArgument("grid size must be >= 1".into()));
    }
    if n_knots == 0 {
        return Err(Error::InvalidArgument("need at least one knot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let knots: Vec<Vec<f64>> = (0..n_knots)
        .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let weights: Vec<f64> = (0..n_knots).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut truth = SyntheticTruth::from_parts(eta, knots, weights, 1.0)?;

    let raw: Vec<f64> = grid_coords(r, r).iter().map(|p| truth.raw_eval(p)).collect();
    let max_abs = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs > 1.0 {
        truth.normalizer = max_abs;
    }
    let data: Vec<f64> = raw.iter().map(|v| v / truth.normalizer).collect();
    let image = NormImage::new(r, r, 1, data)?;
    Ok((image, truth))
}
