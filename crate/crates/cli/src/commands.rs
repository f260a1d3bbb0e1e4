//! The five subcommands.

use crate::config::{
    parse_p, seed_override, BasisSpec, Budgets, ExperimentConfig, MethodSpec, TargetSpec,
};
use crate::io::{write_design_csv, write_rates_csv, DecompositionJson};
use crate::par::par_map;
use crate::report::{
    fit_rate, write_json, BenchmarkReport, CertificateJson, GuaranteeCheck, RatesReport,
    RecoveryReport,
};
use crate::runner::{run_method, run_trial, splitmix};
use crate::setup::{build_basis, build_measure, build_target, BuiltTarget, Workbench};
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use optsample_core::leastsq::lp_error;
use optsample_core::lipschitz::{exact_radius, expected_radius, optimal_error, CircleDesign};
use optsample_core::random_designs::{
    christoffel_density, conditional_christoffel_design, iid_design, randomized_greedy_design,
    DensitySpec,
};
use optsample_core::subsample::{greedy_subsample, rkhs_tail_config};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a sampling design and write points + certificate.
    Design(DesignArgs),
    /// Recover a synthetic target with one method and write a report.
    Recover(RecoverArgs),
    /// Compare the configured methods on one target at a fixed budget.
    Benchmark(BenchmarkArgs),
    /// Error-versus-budget table over the configured n grid, with rate fits.
    Rates(RatesArgs),
    /// Exact closed forms for the periodic Lipschitz class.
    Oracle(OracleArgs),
}

fn parse_basis(name: &str, table: Option<&PathBuf>) -> Result<BasisSpec> {
    Ok(match name {
        "trig" => BasisSpec::Trig,
        "legendre" => BasisSpec::Legendre,
        "haar" => BasisSpec::Haar,
        "custom-tabulated" => BasisSpec::CustomTabulated {
            path: table
                .context("custom-tabulated basis requires --table")?
                .display()
                .to_string(),
        },
        other => bail!("unknown basis family {other:?}"),
    })
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// greedy | iid | christoffel | conditional | algorithm3
    #[arg(long)]
    pub method: String,
    /// trig | legendre | haar | custom-tabulated
    #[arg(long, default_value = "trig")]
    pub basis: String,
    /// Grid file for the custom-tabulated basis.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Prefix dimension of the target space.
    #[arg(long)]
    pub m: usize,
    /// Number of points (ignored by `conditional`, which derives it).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tail decay exponent of the greedy auxiliary family.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1.5)]
    pub alpha0: f64,
    /// Sup-norm growth exponent of the basis prefix.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Output CSV of points (columns x1..xd, w).
    #[arg(long, default_value = "points.csv")]
    pub out: PathBuf,
    /// Output JSON certificate.
    #[arg(long, default_value = "certificate.json")]
    pub cert: PathBuf,
}

#[derive(Serialize)]
struct DesignCertificate {
    method: String,
    m: usize,
    n: usize,
    seed: u64,
    certificate: CertificateJson,
    guarantees: Vec<GuaranteeCheck>,
}

pub fn cmd_design(args: &DesignArgs) -> Result<()> {
    let seed = seed_override().unwrap_or(args.seed);
    let spec = parse_basis(&args.basis, args.table.as_ref())?;
    let bench = build_basis(&spec, Path::new("."))?;
    let theta = args.theta.unwrap_or(bench.theta);
    let m = args.m;
    if m == 0 {
        bail!("--m must be at least 1");
    }
    let need_n = || -> Result<usize> { args.n.context("--n is required for this method") };

    let (design, certificate, mut guarantees) = match args.method.as_str() {
        "greedy" => {
            let n = need_n()?;
            if n < m {
                bail!("greedy designs need n >= m (got n = {n}, m = {m})");
            }
            let config = rkhs_tail_config(
                bench.basis.clone(),
                m,
                n,
                args.alpha0,
                args.t,
                theta,
                100_000,
            )?;
            let out = greedy_subsample(&config, &bench.measure, seed)?;
            let guarantees = vec![
                GuaranteeCheck::lower(
                    "design-gram-lower-bound",
                    out.certificate.lambda_min,
                    out.gram_lower_bound,
                ),
                GuaranteeCheck::lower(
                    "shifted-gram-lower-bound",
                    out.certificate.lambda_min + out.initializer_shift,
                    out.shifted_gram_lower_bound,
                ),
                GuaranteeCheck::upper(
                    "aux-second-moment-upper-bound",
                    out.aux_gram_max,
                    out.aux_upper_bound,
                ),
            ];
            (out.design, out.certificate, guarantees)
        }
        "iid" => {
            let n = need_n()?;
            let design = iid_design(&DensitySpec::flat(), n, &bench.measure, seed)?;
            let cert = optsample_core::leastsq::stability_constant(&design, &bench.basis, m)?;
            (design, cert, Vec::new())
        }
        "christoffel" => {
            let n = need_n()?;
            let density = christoffel_density(bench.basis.clone(), m)?;
            let design = iid_design(&density, n, &bench.measure, seed)?;
            let cert = optsample_core::leastsq::stability_constant(&design, &bench.basis, m)?;
            (design, cert, Vec::new())
        }
        "conditional" => {
            let out = conditional_christoffel_design(bench.basis.clone(), m, &bench.measure, seed)?;
            let guarantees = vec![GuaranteeCheck::lower(
                "conditional-gram-lower-half",
                out.certificate.lambda_min,
                0.5,
            )];
            (out.design, out.certificate, guarantees)
        }
        "algorithm3" => {
            let n = need_n()?;
            let design = randomized_greedy_design(bench.basis.clone(), m, n, &bench.measure, seed)?;
            let cert = optsample_core::leastsq::stability_constant(&design, &bench.basis, m)?;
            (design, cert, Vec::new())
        }
        other => bail!("unknown design method {other:?}"),
    };

    guarantees.push(GuaranteeCheck::lower(
        "gram-nonsingular",
        certificate.lambda_min,
        f64::MIN_POSITIVE,
    ));
    write_design_csv(&args.out, &design)?;
    write_json(
        &args.cert,
        &DesignCertificate {
            method: args.method.clone(),
            m,
            n: design.len(),
            seed,
            certificate: certificate.into(),
            guarantees,
        },
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    /// mlmc | cubes | sqrtlasso | leastsq
    #[arg(long)]
    pub method: String,
    #[arg(long, default_value = "trig")]
    pub basis: String,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// trig-decay | rkhs-random | lipschitz-hat | sparse
    #[arg(long)]
    pub target: String,
    /// Decay exponent of the trig-decay target.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Decay exponent of the rkhs-random target.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 512)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub target_seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub center: f64,
    /// Nonzero coefficients of the sparse target; also the sparsity level of
    /// the sqrtlasso method.
    #[arg(long = "m", alias = "sparsity")]
    pub sparsity: Option<usize>,
    /// Basis prefix size of the sparse target / sqrtlasso method.
    #[arg(long = "N")]
    pub dim: Option<usize>,
    /// Sample budget.
    #[arg(long)]
    pub n: Option<usize>,
    /// Multilevel oversampling factor.
    #[arg(long)]
    pub r: Option<usize>,
    /// Multilevel top level; the output has 2^level coefficients.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub smoothness: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Prefix dimension of the plain least-squares method.
    #[arg(long)]
    pub prefix: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub mc_budget: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec!["2".to_string(), "inf".to_string()])]
    pub error_p: Vec<String>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Also export the cube decomposition (cubes method only).
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
}

fn target_spec(args: &RecoverArgs) -> Result<TargetSpec> {
    Ok(match args.target.as_str() {
        "trig-decay" => TargetSpec::TrigDecay {
            alpha: args.alpha,
            length: args.length,
            seed: args.target_seed,
        },
        "rkhs-random" => TargetSpec::RkhsRandom {
            t: args.t,
            length: args.length,
            seed: args.target_seed,
        },
        "lipschitz-hat" => TargetSpec::LipschitzHat {
            center: args.center,
        },
        "sparse" => TargetSpec::Sparse {
            sparsity: args.sparsity.context("sparse target needs --sparsity")?,
            dim: args.dim.context("sparse target needs --N")?,
            seed: args.target_seed,
        },
        other => bail!("unknown target family {other:?}"),
    })
}

pub fn cmd_recover(args: &RecoverArgs) -> Result<()> {
    let seed = seed_override().unwrap_or(args.seed);
    let spec = parse_basis(&args.basis, args.table.as_ref())?;
    let bench = build_basis(&spec, Path::new("."))?;
    let target_spec = target_spec(args)?;
    let target = build_target(&target_spec, &bench.basis)?;

    let (method, n): (MethodSpec, usize) = match args.method.as_str() {
        "mlmc" => {
            let r = args.r.context("mlmc needs --r")?;
            let level = args.level.context("mlmc needs --level")?;
            (MethodSpec::Mlmc { r }, r * ((1 << (level + 1)) - 1))
        }
        "cubes" => (
            MethodSpec::Cubes {
                smoothness: args.smoothness.context("cubes needs --smoothness")?,
                ell: args.ell,
            },
            args.n.context("cubes needs --n sample points")?,
        ),
        "sqrtlasso" => (
            MethodSpec::SqrtLasso {
                dim: args.dim.context("sqrtlasso needs --N")?,
                sparsity: args.sparsity.context("sqrtlasso needs --sparsity")?,
            },
            args.n.context("sqrtlasso needs --n sample points")?,
        ),
        "leastsq" => {
            let n = args.n.context("leastsq needs --n")?;
            let m = args.prefix.context("leastsq needs --prefix")?;
            if m == 0 || m > n {
                bail!("leastsq needs 1 <= prefix <= n");
            }
            (
                MethodSpec::Iid {
                    oversample: n as f64 / m as f64,
                },
                n,
            )
        }
        other => bail!("unknown recovery method {other:?}"),
    };

    let budgets = Budgets {
        mc_error: args.mc_budget,
        error_ps: args.error_p.clone(),
        trials: 1,
    };
    let started = Instant::now();
    let mut report = run_method(&method, &bench, &target, n, seed, &budgets)?;
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    if let (Some(path), MethodSpec::Cubes { smoothness, ell }) = (&args.decomposition, &method) {
        // Reproduce the decomposition of the first trial for export.
        let s = *smoothness;
        let ell = ell.unwrap_or(s + 1);
        let d = bench.measure.domain().dim();
        let mut rng = optsample_core::rng_stream(splitmix(seed, 0), 0);
        let points: Vec<optsample_core::model::Point> =
            (0..n).map(|_| bench.measure.sample(&mut rng)).collect();
        let dec = optsample_core::scattered::cube_split(&points, ell, d)?;
        write_json(path, &DecompositionJson::from_decomposition(&dec))?;
    }

    write_json(&args.out, &report)?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "benchmark.json")]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let seed = config.effective_seed();
    let bench = bench_from_config(&config, &args.config)?;
    let target = build_target(&config.target, &bench.basis)?;
    let n = *config
        .n_grid
        .first()
        .context("benchmark needs at least one entry in n_grid")?;

    let threads = crate::par::thread_count(args.threads);
    let reports: Vec<Result<RecoveryReport>> = par_map(config.methods.len(), threads, |i| {
        run_method(
            &config.methods[i],
            &bench,
            &target,
            n,
            splitmix(seed, i as u64),
            &config.budgets,
        )
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    write_json(
        &args.out,
        &BenchmarkReport {
            seed,
            n,
            target: serde_json::to_value(&config.target)?,
            reports,
        },
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Tidy CSV (method, n, error) of the primary error exponent.
    #[arg(long, default_value = "rates.csv")]
    pub out_table: PathBuf,
    #[arg(long, default_value = "rates.json")]
    pub out_report: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn cmd_rates(args: &RatesArgs) -> Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    if config.n_grid.len() < 4 {
        bail!(
            "rates needs at least 4 grid points (got {})",
            config.n_grid.len()
        );
    }
    let seed = config.effective_seed();
    let bench = bench_from_config(&config, &args.config)?;
    let target = build_target(&config.target, &bench.basis)?;
    let primary_p = config
        .budgets
        .error_ps
        .first()
        .context("budgets.error_ps must not be empty")?
        .clone();
    parse_p(&primary_p)?;

    let threads = crate::par::thread_count(args.threads);
    let jobs: Vec<(usize, usize)> = (0..config.methods.len())
        .flat_map(|mi| (0..config.n_grid.len()).map(move |ni| (mi, ni)))
        .collect();
    let outcomes: Vec<Result<RecoveryReport>> = par_map(jobs.len(), threads, |j| {
        let (mi, ni) = jobs[j];
        run_method(
            &config.methods[mi],
            &bench,
            &target,
            config.n_grid[ni],
            splitmix(seed, (mi * 1000 + ni) as u64),
            &config.budgets,
        )
    });

    let mut rows: Vec<(String, usize, f64)> = Vec::new();
    let mut reports: Vec<RecoveryReport> = Vec::new();
    for (mi, method) in config.methods.iter().enumerate() {
        let mut ns = Vec::new();
        let mut errors = Vec::new();
        let mut merged: Option<RecoveryReport> = None;
        for ni in 0..config.n_grid.len() {
            let j = mi * config.n_grid.len() + ni;
            let report = outcomes[j]
                .as_ref()
                .map_err(|e| anyhow::anyhow!("{e}"))
                .with_context(|| format!("method {}", method.name()))?;
            let error = *report
                .errors
                .get(&primary_p)
                .context("primary error exponent missing from report")?;
            rows.push((method.name().to_string(), config.n_grid[ni], error));
            ns.push(config.n_grid[ni] as f64);
            errors.push(error);
            if merged.is_none() {
                merged = Some(report.clone());
            }
        }
        let mut summary = merged.expect("grid non-empty");
        summary.rate_fit = Some(fit_rate(&ns, &errors));
        summary.errors = BTreeMap::new(); // per-n errors live in the table
        reports.push(summary);
    }

    write_rates_csv(&args.out_table, &rows)?;
    write_json(
        &args.out_report,
        &RatesReport {
            seed,
            n_grid: config.n_grid.clone(),
            target: serde_json::to_value(&config.target)?,
            reports,
        },
    )?;
    Ok(())
}

fn bench_from_config(config: &ExperimentConfig, config_path: &Path) -> Result<Workbench> {
    let base = config_path.parent().unwrap_or(Path::new("."));
    let mut bench = build_basis(&config.basis, base)?;
    if let Some(measure) = &config.measure {
        bench.measure = build_measure(measure)?;
    }
    Ok(bench)
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub which: OracleKind,
}

#[derive(Subcommand, Debug)]
pub enum OracleKind {
    /// Periodic Lipschitz class: optimal errors and radii of information.
    Lip(LipArgs),
}

#[derive(Args, Debug)]
pub struct LipArgs {
    /// Number of points.
    #[arg(long)]
    pub n: usize,
    /// Error exponent (a number, or "inf").
    #[arg(long)]
    pub p: String,
    /// Expected radius under i.i.d. uniform points instead of the optimum.
    #[arg(long)]
    pub expected: bool,
    /// Evaluate the exact radius of this design (CSV) instead.
    #[arg(long)]
    pub design: Option<PathBuf>,
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    match &args.which {
        OracleKind::Lip(lip) => {
            let p = parse_p(&lip.p)?;
            let value = if let Some(path) = &lip.design {
                let design = crate::io::read_design_csv(path)?;
                let circle = CircleDesign::new(design.points().iter().map(|x| x.x()).collect())?;
                exact_radius(&circle, p)?
            } else if lip.expected {
                expected_radius(lip.n, p)?
            } else {
                optimal_error(lip.n, p)?
            };
            println!("{value}");
        }
    }
    Ok(())
}

/// Shared Monte Carlo error helper for reports (exposed for tests).
pub fn mc_error_of(
    target: &BuiltTarget,
    approx: &dyn Fn(&optsample_core::model::Point) -> optsample_core::Complex64,
    p: f64,
    bench: &Workbench,
    budget: usize,
    seed: u64,
) -> Result<f64> {
    Ok(lp_error(
        target.as_dyn(),
        approx,
        p,
        &bench.measure,
        budget,
        seed,
    )?)
}

/// Re-run a trial and expose the outcome for report-reproducibility tests.
pub fn replay_trial(
    method: &MethodSpec,
    bench: &Workbench,
    target: &BuiltTarget,
    n: usize,
    seed: u64,
) -> Result<crate::runner::TrialOutcome> {
    run_trial(method, bench, target, n, seed)
}
