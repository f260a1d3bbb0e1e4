//! Construction of core objects (bases, measures, targets) from config
//! specs and CLI flags.

use crate::config::{BasisSpec, DomainSpec, MeasureSpec, TargetSpec};
use anyhow::{bail, Context, Result};
use optsample_core::model::{
    Basis, Domain, Expansion, HaarBasis, LegendreBasis, Measure, Point, TabulatedBasis,
    TargetFunction, TrigBasis,
};
use optsample_core::{rng_from_seed, Complex64};
use rand::Rng as _;
use std::path::Path;
use std::sync::Arc;

pub struct Workbench {
    pub basis: Arc<dyn Basis>,
    pub measure: Measure,
    /// The growth exponent of the prefix sup norm, used by greedy configs.
    pub theta: f64,
}

pub fn build_basis(spec: &BasisSpec, base_dir: &Path) -> Result<Workbench> {
    Ok(match spec {
        BasisSpec::Trig => Workbench {
            basis: Arc::new(TrigBasis),
            measure: Measure::uniform(Domain::Circle),
            theta: 0.5,
        },
        BasisSpec::Legendre => Workbench {
            basis: Arc::new(LegendreBasis),
            measure: Measure::uniform(Domain::UnitInterval),
            theta: 1.0,
        },
        BasisSpec::Haar => Workbench {
            basis: Arc::new(HaarBasis),
            measure: Measure::uniform(Domain::UnitInterval),
            theta: 1.0,
        },
        BasisSpec::CustomTabulated { path } => {
            let full = base_dir.join(path);
            let (values, size, dim) = read_table(&full)
                .with_context(|| format!("loading tabulated basis {}", full.display()))?;
            Workbench {
                basis: Arc::new(TabulatedBasis::new(values, size, dim)?),
                measure: Measure::uniform(Domain::FiniteSet { size }),
                theta: 1.0,
            }
        }
    })
}

pub fn build_measure(spec: &MeasureSpec) -> Result<Measure> {
    match spec {
        MeasureSpec::Uniform { domain } => {
            let domain = match domain {
                DomainSpec::UnitInterval => Domain::UnitInterval,
                DomainSpec::Circle => Domain::Circle,
                DomainSpec::UnitCube { dim } => Domain::UnitCube { dim: *dim },
                DomainSpec::FiniteSet { size } => Domain::FiniteSet { size: *size },
            };
            domain.validate()?;
            Ok(Measure::uniform(domain))
        }
    }
}

/// A CSV of floats, one grid point per row, one basis element per column.
fn read_table(path: &Path) -> Result<(Vec<Complex64>, usize, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut values = Vec::new();
    let mut dim = 0usize;
    let mut size = 0usize;
    for record in reader.records() {
        let record = record?;
        if dim == 0 {
            dim = record.len();
        } else if record.len() != dim {
            bail!("ragged table: row {} has {} columns", size, record.len());
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .with_context(|| format!("bad entry {field:?}"))?;
            values.push(Complex64::new(v, 0.0));
        }
        size += 1;
    }
    if size == 0 {
        bail!("empty table");
    }
    Ok((values, size, dim))
}

/// Box-Muller standard normal.
fn gauss(rng: &mut optsample_core::Rng) -> f64 {
    let u: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub enum BuiltTarget {
    Expansion(Expansion),
    Pointwise(Box<dyn TargetFunction>),
}

impl BuiltTarget {
    pub fn as_dyn(&self) -> &dyn TargetFunction {
        match self {
            BuiltTarget::Expansion(e) => e,
            BuiltTarget::Pointwise(f) => f.as_ref(),
        }
    }

    pub fn expansion(&self) -> Option<&Expansion> {
        match self {
            BuiltTarget::Expansion(e) => Some(e),
            BuiltTarget::Pointwise(_) => None,
        }
    }
}

pub fn build_target(spec: &TargetSpec, basis: &Arc<dyn Basis>) -> Result<BuiltTarget> {
    Ok(match spec {
        TargetSpec::TrigDecay {
            alpha,
            length,
            seed,
        } => BuiltTarget::Expansion(Expansion::with_decay(basis.clone(), *alpha, *length, *seed)),
        TargetSpec::RkhsRandom { t, length, seed } => {
            let mut rng = rng_from_seed(*seed);
            let mut xi: Vec<Complex64> = (0..*length)
                .map(|_| Complex64::new(gauss(&mut rng), gauss(&mut rng)))
                .collect();
            let norm = xi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let coeffs: Vec<Complex64> = xi
                .iter_mut()
                .enumerate()
                .map(|(k, x)| *x / norm * (k.max(1) as f64).powf(-t))
                .collect();
            BuiltTarget::Expansion(Expansion::new(basis.clone(), coeffs))
        }
        TargetSpec::LipschitzHat { center } => {
            let center = *center;
            BuiltTarget::Pointwise(Box::new(move |x: &Point| {
                Complex64::new(optsample_core::model::circle_dist(x.x(), center), 0.0)
            }))
        }
        TargetSpec::Sparse {
            sparsity,
            dim,
            seed,
        } => {
            if sparsity > dim {
                bail!("sparsity {sparsity} exceeds dimension {dim}");
            }
            let mut rng = rng_from_seed(*seed);
            let mut coeffs = vec![Complex64::ZERO; *dim];
            let mut placed = 0;
            while placed < *sparsity {
                let j = rng.gen_range(0..*dim);
                if coeffs[j].norm() == 0.0 {
                    let phase = rng.gen::<f64>() * std::f64::consts::TAU;
                    coeffs[j] = Complex64::new(phase.cos(), phase.sin()) * (0.3 + rng.gen::<f64>());
                    placed += 1;
                }
            }
            BuiltTarget::Expansion(Expansion::new(basis.clone(), coeffs))
        }
    })
}
