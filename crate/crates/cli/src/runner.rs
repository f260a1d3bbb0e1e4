//! Shared machinery that runs one method at one sample budget and measures
//! its errors, used by `rates` and `benchmark`.

use crate::config::{parse_p, Budgets, MethodSpec};
use crate::report::{CertificateJson, GuaranteeCheck, RecoveryReport};
use crate::setup::{BuiltTarget, Workbench};
use anyhow::{bail, Context, Result};
use optsample_core::leastsq::{fit, lp_error, stability_constant};
use optsample_core::model::{Point, SampledDesign, TargetFunction};
use optsample_core::multilevel::{ml_recover, MlConfig};
use optsample_core::random_designs::{
    christoffel_density, conditional_christoffel_design, iid_design, randomized_greedy_design,
    DensitySpec,
};
use optsample_core::sparse::{rip_check, sqrt_lasso, SparseProblem};
use optsample_core::subsample::{greedy_subsample, rkhs_tail_config};
use optsample_core::{rng_stream, Complex64};
use std::collections::BTreeMap;
use std::time::Instant;

pub struct TrialOutcome {
    /// Evaluable approximant for Monte Carlo error estimation.
    pub approx: Box<dyn Fn(&Point) -> Complex64 + Send + Sync>,
    /// Coefficients over the basis prefix, when the method produces them.
    pub coefficients: Option<Vec<Complex64>>,
    pub certificate: Option<CertificateJson>,
    pub guarantees: Vec<GuaranteeCheck>,
}

fn sample_values(target: &dyn TargetFunction, design: &SampledDesign) -> Vec<Complex64> {
    design.points().iter().map(|x| target.eval(x)).collect()
}

/// Fit tolerance used by the harness.
const FIT_TOL: f64 = 1e-12;

/// Run one seeded trial of a method at sample budget `n`.
pub fn run_trial(
    method: &MethodSpec,
    bench: &Workbench,
    target: &BuiltTarget,
    n: usize,
    seed: u64,
) -> Result<TrialOutcome> {
    let f = target.as_dyn();
    match method {
        MethodSpec::Greedy {
            oversample,
            t,
            alpha0,
            theta,
            tail_cap,
        } => {
            let m = prefix_dim(n, *oversample)?;
            let config = rkhs_tail_config(
                bench.basis.clone(),
                m,
                n,
                *alpha0,
                *t,
                theta.max(bench.theta),
                *tail_cap,
            )?;
            let out = greedy_subsample(&config, &bench.measure, seed)?;
            let mut guarantees = vec![
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
            let r = (m as f64 / (n + 1) as f64).sqrt();
            guarantees.push(GuaranteeCheck::upper(
                "stability-constant-bound",
                out.certificate.stability_k,
                1.0 / (1.0 - r),
            ));
            ls_outcome(bench, f, out.design, m, Some(guarantees))
        }
        MethodSpec::Iid { oversample } => {
            let m = prefix_dim(n, *oversample)?;
            let design = iid_design(&DensitySpec::flat(), n, &bench.measure, seed)?;
            ls_outcome(bench, f, design, m, None)
        }
        MethodSpec::Christoffel { oversample } => {
            let m = prefix_dim(n, *oversample)?;
            let density = christoffel_density(bench.basis.clone(), m)?;
            let design = iid_design(&density, n, &bench.measure, seed)?;
            let worst = design
                .iter()
                .map(|(x, w)| (w * n as f64 * density.eval(x) - 1.0).abs())
                .fold(0.0f64, f64::max);
            let guarantees = vec![GuaranteeCheck::upper(
                "self-normalizing-weights-exact",
                worst,
                1e-9,
            )];
            ls_outcome(bench, f, design, m, Some(guarantees))
        }
        MethodSpec::Conditional {} => {
            let m = largest_conditional_prefix(n)?;
            let out = conditional_christoffel_design(bench.basis.clone(), m, &bench.measure, seed)?;
            let guarantees = vec![GuaranteeCheck::lower(
                "conditional-gram-lower-half",
                out.certificate.lambda_min,
                0.5,
            )];
            ls_outcome(bench, f, out.design, m, Some(guarantees))
        }
        MethodSpec::Algorithm3 { oversample } => {
            let m = prefix_dim(n, *oversample)?.max(2);
            let design = randomized_greedy_design(bench.basis.clone(), m, n, &bench.measure, seed)?;
            ls_outcome(bench, f, design, m, None)
        }
        MethodSpec::Equispaced { oversample } => {
            let m = prefix_dim(n, *oversample)?;
            let design = optsample_core::leastsq::equispaced_circle_design(n);
            ls_outcome(bench, f, design, m, None)
        }
        MethodSpec::LipOracle {} => {
            unreachable!("handled in run_method before trials")
        }
        MethodSpec::Mlmc { r } => {
            let k = largest_mlmc_level(n, *r)?;
            let config = MlConfig {
                r: *r,
                k,
                basis: bench.basis.clone(),
            };
            let out = ml_recover(f, &config, &bench.measure, seed)?;
            let budget = out.design().len();
            let guarantees = vec![GuaranteeCheck::upper(
                "sample-budget",
                budget as f64,
                (*r as f64) * (1u64 << (k + 1)) as f64,
            )];
            let coefficients = out.coefficients().to_vec();
            Ok(TrialOutcome {
                approx: Box::new(move |x| out.eval(x)),
                coefficients: Some(coefficients),
                certificate: None,
                guarantees,
            })
        }
        MethodSpec::Cubes { smoothness, ell } => {
            let s = *smoothness;
            let ell = ell.unwrap_or(s + 1);
            let d = bench.measure.domain().dim();
            let mut rng = rng_stream(seed, 0);
            let points: Vec<Point> = (0..n).map(|_| bench.measure.sample(&mut rng)).collect();
            let values: Vec<f64> = points.iter().map(|x| f.eval(x).re).collect();
            let approx = optsample_core::scattered::piecewise_recover(&values, &points, s, ell, d)?;
            let guarantees = vec![
                GuaranteeCheck::upper(
                    "tested-cubes-linear",
                    approx.decomposition().tested_cubes as f64,
                    2.0 * n as f64,
                ),
                GuaranteeCheck::upper(
                    "degree-fallbacks",
                    approx.degree_fallbacks.len() as f64,
                    0.0,
                ),
            ];
            Ok(TrialOutcome {
                approx: Box::new(move |x| Complex64::new(approx.eval(x), 0.0)),
                coefficients: None,
                certificate: None,
                guarantees,
            })
        }
        MethodSpec::SqrtLasso { dim, sparsity } => {
            let mut rng = rng_stream(seed, 0);
            let points: Vec<Point> = (0..n).map(|_| bench.measure.sample(&mut rng)).collect();
            let problem = SparseProblem::with_default_lambda(
                bench.basis.clone(),
                *dim,
                points.clone(),
                *sparsity,
            )?;
            let values = points.iter().map(|x| f.eval(x)).collect::<Vec<_>>();
            let out = sqrt_lasso(&values, &problem, 1e-8)?;
            let mut guarantees = Vec::new();
            // Brute-force isometry verification only at desk scale; larger
            // runs carry the probabilistic caveat instead.
            let feasible = *dim <= 32 && 2 * sparsity <= 6;
            if feasible {
                let rip = rip_check(
                    &points,
                    &bench.basis,
                    *dim,
                    2 * sparsity,
                    0.75,
                    1.25,
                    optsample_core::sparse::DEFAULT_SUPPORT_CAP,
                )?;
                guarantees.push(GuaranteeCheck {
                    name: "restricted-isometry-verified".into(),
                    holds: rip.holds,
                    margin: (rip.min_eigenvalue - 0.75).min(1.25 - rip.max_eigenvalue),
                });
            } else {
                guarantees.push(GuaranteeCheck {
                    name: "restricted-isometry-unverified-probabilistic".into(),
                    holds: true,
                    margin: 0.0,
                });
            }
            let monotone = out.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            guarantees.push(GuaranteeCheck {
                name: "solver-objective-monotone".into(),
                holds: monotone,
                margin: 0.0,
            });
            let basis = bench.basis.clone();
            let coefficients = out.coefficients.clone();
            let dim = *dim;
            Ok(TrialOutcome {
                approx: Box::new(move |x| {
                    let mut row = vec![Complex64::ZERO; dim];
                    basis.eval_block(0, x, &mut row);
                    out.coefficients.iter().zip(&row).map(|(c, b)| c * b).sum()
                }),
                coefficients: Some(coefficients),
                certificate: None,
                guarantees,
            })
        }
    }
}

fn ls_outcome(
    bench: &Workbench,
    f: &dyn TargetFunction,
    design: SampledDesign,
    m: usize,
    guarantees: Option<Vec<GuaranteeCheck>>,
) -> Result<TrialOutcome> {
    let certificate = stability_constant(&design, &bench.basis, m)?;
    let values = sample_values(f, &design);
    let fitted = fit(&values, &design, bench.basis.clone(), m, FIT_TOL)?;
    let coefficients = fitted.coefficients().to_vec();
    Ok(TrialOutcome {
        approx: Box::new(move |x| fitted.eval(x)),
        coefficients: Some(coefficients),
        certificate: Some(certificate.into()),
        guarantees: guarantees.unwrap_or_default(),
    })
}

fn prefix_dim(n: usize, oversample: f64) -> Result<usize> {
    // The negated form rejects NaN too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(oversample >= 1.0) {
        bail!("oversample factor must be >= 1");
    }
    let m = (n as f64 / oversample).floor() as usize;
    if m == 0 {
        bail!("sample budget {n} too small for oversample {oversample}");
    }
    Ok(m)
}

/// Largest prefix dimension whose conditional design fits in `n` samples.
fn largest_conditional_prefix(n: usize) -> Result<usize> {
    let needed = |m: usize| (10.0 * m as f64 * (4.0 * m as f64).ln()).ceil() as usize;
    let mut m = 1usize;
    if needed(1) > n {
        bail!("sample budget {n} below the {} needed for m = 1", needed(1));
    }
    while needed(m + 1) <= n {
        m += 1;
    }
    Ok(m)
}

/// Largest level whose full multilevel budget fits in `n` samples.
fn largest_mlmc_level(n: usize, r: usize) -> Result<usize> {
    if r == 0 {
        bail!("oversampling factor r must be >= 1");
    }
    let budget = |k: usize| r * ((1usize << (k + 1)) - 1);
    if budget(0) > n {
        bail!(
            "sample budget {n} below the minimal multilevel budget {}",
            budget(0)
        );
    }
    let mut k = 0usize;
    while budget(k + 1) <= n {
        k += 1;
    }
    Ok(k)
}

/// Run a method at budget `n`: average the requested error norms over the
/// configured trials (exactly in coefficient space when the target has
/// known coefficients and p = 2, by Monte Carlo otherwise).
pub fn run_method(
    method: &MethodSpec,
    bench: &Workbench,
    target: &BuiltTarget,
    n: usize,
    seed: u64,
    budgets: &Budgets,
) -> Result<RecoveryReport> {
    let started = Instant::now();
    if let MethodSpec::LipOracle {} = method {
        // Closed form, no sampling: the minimal worst-case error at budget n.
        let mut errors = BTreeMap::new();
        for p_str in &budgets.error_ps {
            let p = parse_p(p_str)?;
            errors.insert(
                p_str.clone(),
                optsample_core::lipschitz::optimal_error(n, p)?,
            );
        }
        return Ok(RecoveryReport {
            method: method.name().into(),
            parameters: serde_json::to_value(method)?,
            errors,
            certificate: None,
            guarantees: Vec::new(),
            rate_fit: None,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    let trials = budgets.trials.max(1);
    let mut per_p: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut certificate = None;
    let mut guarantees: Vec<GuaranteeCheck> = Vec::new();

    for trial in 0..trials {
        let trial_seed = splitmix(seed, trial as u64);
        let outcome = run_trial(method, bench, target, n, trial_seed)
            .with_context(|| format!("method {} at n = {n}", method.name()))?;
        for p_str in &budgets.error_ps {
            let p = parse_p(p_str)?;
            let error = match (target.expansion(), &outcome.coefficients, p == 2.0) {
                (Some(exp), Some(coeffs), true) => exp.l2_error_sq_vs(coeffs).sqrt(),
                _ => lp_error(
                    target.as_dyn(),
                    &outcome.approx,
                    p,
                    &bench.measure,
                    budgets.mc_error,
                    splitmix(trial_seed, 0xE),
                )?,
            };
            per_p.entry(p_str.clone()).or_default().push(error);
        }
        if certificate.is_none() {
            certificate = outcome.certificate;
        }
        merge_guarantees(&mut guarantees, outcome.guarantees);
    }

    let errors: BTreeMap<String, f64> = per_p
        .into_iter()
        .map(|(p, samples)| {
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            (p, mean)
        })
        .collect();
    Ok(RecoveryReport {
        method: method.name().into(),
        parameters: serde_json::to_value(method)?,
        errors,
        certificate,
        guarantees,
        rate_fit: None,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Keep the worst margin per guarantee name across trials.
fn merge_guarantees(acc: &mut Vec<GuaranteeCheck>, new: Vec<GuaranteeCheck>) {
    for check in new {
        match acc.iter_mut().find(|g| g.name == check.name) {
            Some(existing) => {
                existing.holds &= check.holds;
                if check.margin < existing.margin {
                    existing.margin = check.margin;
                }
            }
            None => acc.push(check),
        }
    }
}

/// Cheap deterministic seed mixer for derived streams.
pub fn splitmix(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
