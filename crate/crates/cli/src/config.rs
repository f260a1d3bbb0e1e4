//! Experiment configuration: versioned JSON schema with unknown keys
//! rejected.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub basis: BasisSpec,
    /// Defaults to the natural measure of the basis family.
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    pub target: TargetSpec,
    pub methods: Vec<MethodSpec>,
    /// Sample budgets for `rates`; `benchmark` uses the first entry.
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub budgets: Budgets,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: Self = serde_json::from_str(&text).context("parsing config JSON")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            bail!(
                "config version {} not supported (expected {CONFIG_VERSION})",
                self.version
            );
        }
        if self.methods.is_empty() {
            bail!("config lists no methods");
        }
        Ok(())
    }

    /// Seed, with the environment override applied.
    pub fn effective_seed(&self) -> u64 {
        seed_override().unwrap_or(self.seed)
    }
}

pub fn seed_override() -> Option<u64> {
    std::env::var("OPTSAMPLE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BasisSpec {
    /// Fourier exponentials on the circle, frequencies 0, 1, -1, 2, -2, ...
    Trig,
    /// Normalized shifted Legendre polynomials on [0, 1].
    Legendre,
    /// The Haar system on [0, 1].
    Haar,
    /// Values tabulated on a finite grid, one row per grid point, one column
    /// per basis element (CSV, no header).
    CustomTabulated { path: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Uniform { domain: DomainSpec },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DomainSpec {
    UnitInterval,
    Circle,
    UnitCube { dim: usize },
    FiniteSet { size: usize },
}

/// Named synthetic target families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Coefficients with prescribed best-approximation decay `m^-alpha`.
    TrigDecay {
        alpha: f64,
        #[serde(default = "default_target_length")]
        length: usize,
        #[serde(default)]
        seed: u64,
    },
    /// `f = sum sigma_k xi_k b_k` with `sigma_k = k^-t` and a unit-sphere
    /// coefficient draw.
    RkhsRandom {
        t: f64,
        #[serde(default = "default_target_length")]
        length: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Distance to a point on the circle: the canonical worst-case element
    /// of the Lipschitz class.
    LipschitzHat {
        #[serde(default = "default_hat_center")]
        center: f64,
    },
    /// Exactly sparse expansion: `sparsity` nonzero coefficients among the
    /// first `dim` basis elements.
    Sparse {
        sparsity: usize,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_target_length() -> usize {
    512
}

fn default_hat_center() -> f64 {
    0.5
}

/// Method/parameter blocks understood by `rates` and `benchmark`. Design
/// methods recover with weighted least squares on a prefix of dimension
/// `n / oversample`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodSpec {
    /// Deterministic greedy subsampling with the scaled-tail auxiliary
    /// family.
    Greedy {
        #[serde(default = "default_oversample")]
        oversample: f64,
        #[serde(default = "default_t")]
        t: f64,
        #[serde(default = "default_alpha0")]
        alpha0: f64,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default = "default_tail_cap")]
        tail_cap: usize,
    },
    /// i.i.d. points from the measure itself, weights 1/n.
    Iid {
        #[serde(default = "default_oversample")]
        oversample: f64,
    },
    /// i.i.d. points from the prefix density with self-normalizing weights.
    Christoffel {
        #[serde(default = "default_oversample")]
        oversample: f64,
    },
    /// Conditional prefix-density design, redrawn until the Gram
    /// certificate holds.
    Conditional {},
    /// Sequential randomized barrier-density design.
    Algorithm3 {
        #[serde(default = "default_oversample")]
        oversample: f64,
    },
    /// Multilevel Monte Carlo coefficient estimation.
    Mlmc {
        #[serde(default = "default_mlmc_r")]
        r: usize,
    },
    /// Cube splitting plus local polynomial fits (unit interval / cube).
    Cubes {
        smoothness: usize,
        #[serde(default)]
        ell: Option<usize>,
    },
    /// Square-root Lasso over a basis prefix of size `dim`.
    SqrtLasso { dim: usize, sparsity: usize },
    /// Equispaced circle design with weights 1/n (reference method).
    Equispaced {
        #[serde(default = "default_oversample")]
        oversample: f64,
    },
    /// Information-theoretic reference: the exact worst-case error of the
    /// best algorithm on n equispaced points for the unit Lipschitz class,
    /// reported per error exponent. No sampling happens; the row anchors
    /// rate tables at the optimum.
    LipOracle {},
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Greedy { .. } => "greedy",
            MethodSpec::Iid { .. } => "iid",
            MethodSpec::Christoffel { .. } => "christoffel",
            MethodSpec::Conditional {} => "conditional",
            MethodSpec::Algorithm3 { .. } => "algorithm3",
            MethodSpec::Mlmc { .. } => "mlmc",
            MethodSpec::Cubes { .. } => "cubes",
            MethodSpec::SqrtLasso { .. } => "sqrtlasso",
            MethodSpec::Equispaced { .. } => "equispaced",
            MethodSpec::LipOracle {} => "lip-oracle",
        }
    }
}

fn default_oversample() -> f64 {
    2.0
}
fn default_t() -> f64 {
    1.0
}
fn default_alpha0() -> f64 {
    1.5
}
fn default_theta() -> f64 {
    0.5
}
fn default_tail_cap() -> usize {
    20_000
}
fn default_mlmc_r() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Monte Carlo budget of the L_p error estimator.
    #[serde(default = "default_mc_error")]
    pub mc_error: usize,
    /// Error exponents to report ("1", "2", ..., "inf").
    #[serde(default = "default_error_ps")]
    pub error_ps: Vec<String>,
    /// Independent trials per grid point for randomized methods.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            mc_error: default_mc_error(),
            error_ps: default_error_ps(),
            trials: default_trials(),
        }
    }
}

fn default_mc_error() -> usize {
    100_000
}
fn default_error_ps() -> Vec<String> {
    vec!["2".into(), "inf".into()]
}
fn default_trials() -> usize {
    8
}

pub fn parse_p(s: &str) -> Result<f64> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let p: f64 = s.parse().with_context(|| format!("bad exponent {s:?}"))?;
    if p < 1.0 {
        bail!("error exponent must be >= 1 (got {p})");
    }
    Ok(p)
}
