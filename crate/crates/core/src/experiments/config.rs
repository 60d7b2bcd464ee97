//! JSON experiment configuration. Unknown keys are rejected at every level.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub surrogate: Option<SurrogateSpec>,
    #[serde(default)]
    pub metrics: Option<Vec<Metric>>,
    /// Midpoint cells per axis of the reference quadrature.
    #[serde(default)]
    pub ref_resolution: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub bounds: Option<BoundsSpec>,
    #[serde(default)]
    pub histogram: Option<HistogramSpec>,
    /// Fill the `walltime_ms` column. Off by default so outputs are reproducible.
    #[serde(default)]
    pub timing: bool,
    /// Recompute `W_1` at the first and last sweep points with `2M` cells.
    #[serde(default = "default_true")]
    pub resolution_check: bool,
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    /// Same as parsing `{}`.
    fn default() -> Self {
        ExperimentConfig {
            problem: None,
            surrogate: None,
            metrics: None,
            ref_resolution: None,
            seed: None,
            output_dir: None,
            bounds: None,
            histogram: None,
            timing: false,
            resolution_check: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    /// `f(α) = α/2 + tanh(9α)` under `U[−1, 1]`.
    TanhPaper,
    /// `f(v) = v²` under `U[1, 2]`.
    Oscillator,
    /// `f(α) = α`, `g(α) = α + δ sin(α/(10δ))` under `U[0, 1]`.
    OscillatoryG,
    /// `f_k = 0` on `[0, 1/2]`, `(α − 1/2)^k` on `[1/2, 1]` under `U[0, 1]`.
    FkAtom,
    /// User expressions.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: ProblemName,
    /// Amplitude for `oscillatory-g`.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Smoothness index for `fk-atom`.
    #[serde(default)]
    pub k: Option<u32>,
    /// Expression for `f` (custom problems).
    #[serde(default)]
    pub f: Option<String>,
    /// Optional fixed partner `g` (custom problems).
    #[serde(default)]
    pub g: Option<String>,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    /// Intervals on which `f` is strictly monotone (1D only).
    #[serde(default)]
    pub pieces: Option<Vec<[f64; 2]>>,
}

impl ProblemSpec {
    pub fn named(name: ProblemName) -> Self {
        ProblemSpec { name, delta: None, k: None, f: None, g: None, domain: None, weight: None, pieces: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Uniform {},
    Jacobi { beta1: f64, beta2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateKind {
    Pwl,
    Spline,
    TensorSpline,
    Gpc,
}

impl SurrogateKind {
    /// Sweep used when the config gives none.
    pub fn default_sweep(self) -> Vec<usize> {
        match self {
            SurrogateKind::Gpc => vec![4, 8, 16, 32, 64, 120],
            SurrogateKind::Pwl => vec![4, 8, 16, 32, 64, 128],
            SurrogateKind::Spline => vec![8, 16, 32, 64, 128, 256],
            SurrogateKind::TensorSpline => vec![8, 16, 32, 64],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundarySpec {
    NotAKnot,
    Natural,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    /// Nodes per axis for each sweep point; strictly increasing.
    #[serde(default)]
    pub n_sweep: Option<Vec<usize>>,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
}

impl SurrogateSpec {
    pub fn of(kind: SurrogateKind) -> Self {
        SurrogateSpec { kind, n_sweep: None, boundary: None }
    }

    pub fn sweep(&self) -> Result<Vec<usize>> {
        let sweep = self.n_sweep.clone().unwrap_or_else(|| self.kind.default_sweep());
        if sweep.is_empty() {
            return Err(Error::Config("n_sweep is empty".into()));
        }
        if sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("n_sweep must be strictly increasing, got {sweep:?}")));
        }
        Ok(sweep)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_q_list")]
    pub q_list: Vec<f64>,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
}

fn default_p() -> f64 {
    1.0
}

fn default_q_list() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_k_max() -> u32 {
    5
}

impl Default for BoundsSpec {
    fn default() -> Self {
        BoundsSpec { p: default_p(), q_list: default_q_list(), k_max: default_k_max() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    /// Number of independent seeds, derived from the run seed.
    #[serde(default = "default_seed_count")]
    pub seeds: usize,
    /// Sample budgets `N`; strictly increasing.
    #[serde(default = "default_budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "default_atoms_per_bin")]
    pub atoms_per_bin: usize,
}

fn default_seed_count() -> usize {
    20
}

fn default_budgets() -> Vec<usize> {
    vec![16, 32, 64, 128, 256, 512]
}

fn default_atoms_per_bin() -> usize {
    16
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec { seeds: default_seed_count(), budgets: default_budgets(), atoms_per_bin: default_atoms_per_bin() }
    }
}

/// A distance between the exact and surrogate pushforwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    W1,
    W2,
    Wp(f64),
    /// `∫ |F_μ − F_ν|`.
    L1Cdf,
    /// `∫ |p_μ − p_ν|` of the exact piecewise-monotone densities.
    L1Pdf,
    /// `‖μ − ν‖_{Ḣ⁻¹}`.
    Hm1,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::W1 => f.write_str("w1"),
            Metric::W2 => f.write_str("w2"),
            Metric::Wp(p) => write!(f, "wp({p})"),
            Metric::L1Cdf => f.write_str("l1cdf"),
            Metric::L1Pdf => f.write_str("l1pdf"),
            Metric::Hm1 => f.write_str("hm1"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "w1" => Metric::W1,
            "w2" => Metric::W2,
            "l1cdf" => Metric::L1Cdf,
            "l1pdf" => Metric::L1Pdf,
            "hm1" => Metric::Hm1,
            _ => {
                let inner = s
                    .strip_prefix("wp(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))?;
                let p: f64 = inner.trim().parse().map_err(|_| Error::Config(format!("bad order in metric {s:?}")))?;
                if !(p >= 1.0) || !p.is_finite() {
                    return Err(Error::Config(format!("metric order must be finite and >= 1, got {p}")));
                }
                Metric::Wp(p)
            }
        })
    }
}

impl TryFrom<String> for Metric {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.to_string()
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn metrics_or(&self, default: &[Metric]) -> Result<Vec<Metric>> {
        let metrics = self.metrics.clone().unwrap_or_else(|| default.to_vec());
        if metrics.is_empty() {
            return Err(Error::Config("metric list is empty".into()));
        }
        Ok(metrics)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}
