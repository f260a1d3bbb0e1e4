//! Randomized design constructions: i.i.d. sampling from prefix and
//! tail-weighted densities, conditional (accept/reject) Christoffel designs,
//! and a sequential randomized construction with minimal oversampling that
//! draws each point from a barrier-guided density.

use crate::error::{invalid, Error, Result};
use crate::leastsq::{self, SpectralCertificate};
use crate::linalg::{add_outer, eig_range, hermitize, quad_form};
use crate::model::{Basis, BasisDim, Measure, Point, SampledDesign};
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;
use nalgebra::{Cholesky, DMatrix};
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// Default cap on redraws of a conditional design. Acceptance probability is
/// at least 1/2 per draw, so hitting the cap flags a basis/measure mismatch
/// rather than bad luck.
pub const DEFAULT_REDRAW_CAP: usize = 64;

/// Default budget of rejection-sampling tries per accepted point.
pub const DEFAULT_REJECTION_BUDGET: usize = 100_000;

/// A probability density against a measure, with an optional sup bound for
/// rejection sampling.
pub struct DensitySpec {
    kind: DensityKind,
    sup_bound: Option<f64>,
}

enum DensityKind {
    /// Density identically one: sample the measure directly.
    Flat,
    /// Prefix density `(1/m) sum_{k<m} |b_k(x)|^2`.
    Christoffel { basis: Arc<dyn Basis>, m: usize },
    /// Half prefix density, half tail-energy density
    /// `(1/T) sum_{k>=m} sigma_k^2 |b_k(x)|^2` with `T` the tail mass.
    TailWeighted {
        basis: Arc<dyn Basis>,
        m: usize,
        sigmas_sq: Vec<f64>,
        tail_mass: f64,
    },
}

impl DensitySpec {
    pub fn flat() -> Self {
        Self {
            kind: DensityKind::Flat,
            sup_bound: Some(1.0),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match &self.kind {
            DensityKind::Flat => 1.0,
            DensityKind::Christoffel { basis, m } => {
                let mut vals = alloc::vec![Complex64::ZERO; *m];
                basis.eval_block(0, x, &mut vals);
                vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / *m as f64
            }
            DensityKind::TailWeighted {
                basis,
                m,
                sigmas_sq,
                tail_mass,
            } => {
                let mut vals = alloc::vec![Complex64::ZERO; sigmas_sq.len()];
                basis.eval_block(0, x, &mut vals);
                let prefix: f64 = vals[..*m].iter().map(|v| v.norm_sqr()).sum::<f64>() / *m as f64;
                let tail: f64 = vals[*m..]
                    .iter()
                    .zip(&sigmas_sq[*m..])
                    .map(|(v, s)| s * v.norm_sqr())
                    .sum::<f64>()
                    / tail_mass;
                0.5 * (prefix + tail)
            }
        }
    }

    /// Finite upper bound for rejection sampling, when one is known.
    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    /// Override the rejection bound, e.g. with a user-supplied constant.
    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    /// Draw one point from `density * d(measure)` by rejection sampling.
    pub fn sample(
        &self,
        measure: &Measure,
        rng: &mut crate::Rng,
        budget: usize,
    ) -> Result<(Point, f64)> {
        use rand::Rng as _;
        if matches!(self.kind, DensityKind::Flat) {
            return Ok((measure.sample(rng), 1.0));
        }
        let bound = self.sup_bound.ok_or(Error::NoRejectionBound)?;
        for _ in 0..budget {
            let x = measure.sample(rng);
            let rho = self.eval(&x);
            // Points where the density vanishes are rejected outright; they
            // carry no mass under the sampling law.
            if rho > 0.0 && rng.gen::<f64>() * bound <= rho {
                return Ok((x, rho));
            }
        }
        Err(Error::RejectionBudgetExceeded { budget })
    }
}

impl core::fmt::Debug for DensitySpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let name = match &self.kind {
            DensityKind::Flat => "flat",
            DensityKind::Christoffel { .. } => "christoffel",
            DensityKind::TailWeighted { .. } => "tail-weighted",
        };
        f.debug_struct("DensitySpec")
            .field("kind", &name)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

fn check_prefix(basis: &dyn Basis, m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("prefix density needs m >= 1"));
    }
    if let BasisDim::Finite(d) = basis.dim() {
        if m > d {
            return Err(Error::IndexOutOfRange {
                index: m - 1,
                dim: d,
            });
        }
    }
    Ok(())
}

/// The prefix density `(1/m) sum_{k<m} |b_k(x)|^2` of the first `m` basis
/// elements; a probability density with respect to the orthonormality
/// measure of the basis. The sup bound comes from the basis, when known.
pub fn christoffel_density(basis: Arc<dyn Basis>, m: usize) -> Result<DensitySpec> {
    check_prefix(&basis, m)?;
    let sup_bound = basis.prefix_sup_sq(m).map(|s| s / m as f64);
    Ok(DensitySpec {
        kind: DensityKind::Christoffel { basis, m },
        sup_bound,
    })
}

/// The variance-optimal density for recovering prefix coefficients of
/// functions with singular-value decay `sigmas`: an even mixture of the
/// prefix density and the tail-energy density. `sigmas` lists the leading
/// singular values; entries beyond its length are zero.
pub fn optimal_rkhs_density(
    basis: Arc<dyn Basis>,
    m: usize,
    sigmas: &[f64],
) -> Result<DensitySpec> {
    check_prefix(&basis, m)?;
    if sigmas.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return Err(invalid("singular values must be non-increasing"));
    }
    let sigmas_sq: Vec<f64> = sigmas.iter().map(|s| s * s).collect();
    let tail_mass: f64 = sigmas_sq.iter().skip(m).sum();
    if tail_mass <= 0.0 {
        return Err(Error::DegenerateTail { m });
    }
    let sup_bound = match (basis.prefix_sup_sq(m), basis.theta()) {
        (Some(prefix), Some(theta)) => Some(0.5 * (prefix / m as f64 + theta * theta)),
        _ => None,
    };
    Ok(DensitySpec {
        kind: DensityKind::TailWeighted {
            basis,
            m,
            sigmas_sq,
            tail_mass,
        },
        sup_bound,
    })
}

/// Draw `n` i.i.d. points from `density * d(measure)` and attach the
/// self-normalizing weights `w_i = 1 / (n rho(x_i))`, which make the
/// discrete squared norm unbiased for the squared L2 norm.
pub fn iid_design(
    density: &DensitySpec,
    n: usize,
    measure: &Measure,
    seed: u64,
) -> Result<SampledDesign> {
    let mut rng = crate::rng_from_seed(seed);
    iid_design_with_rng(density, n, measure, &mut rng)
}

pub(crate) fn iid_design_with_rng(
    density: &DensitySpec,
    n: usize,
    measure: &Measure,
    rng: &mut crate::Rng,
) -> Result<SampledDesign> {
    if n == 0 {
        return Err(invalid("iid design needs n >= 1"));
    }
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, rho) = density.sample(measure, rng, DEFAULT_REJECTION_BUDGET)?;
        points.push(x);
        weights.push(1.0 / (n as f64 * rho));
    }
    SampledDesign::new(points, weights)
}

/// Output of a conditional design draw.
#[derive(Debug, Clone)]
pub struct ConditionalDesign {
    pub design: SampledDesign,
    pub certificate: SpectralCertificate,
    /// Total draws needed until the spectral condition held (1 = first try).
    pub draws: usize,
}

/// Conditional Christoffel design: `n = ceil(10 m ln(4m))` i.i.d. points
/// from the prefix density, redrawn until the design Gram satisfies
/// `lambda_min >= 1/2`. The returned design always carries that certificate;
/// acceptance has probability at least 1/2 per draw, so the expected number
/// of draws is at most two.
pub fn conditional_christoffel_design(
    basis: Arc<dyn Basis>,
    m: usize,
    measure: &Measure,
    seed: u64,
) -> Result<ConditionalDesign> {
    conditional_christoffel_design_with_cap(basis, m, measure, seed, DEFAULT_REDRAW_CAP)
}

pub fn conditional_christoffel_design_with_cap(
    basis: Arc<dyn Basis>,
    m: usize,
    measure: &Measure,
    seed: u64,
    redraw_cap: usize,
) -> Result<ConditionalDesign> {
    let density = christoffel_density(basis.clone(), m)?;
    let n = (10.0 * m as f64 * (4.0 * m as f64).ln()).ceil() as usize;
    let mut rng = crate::rng_from_seed(seed);
    for draw in 1..=redraw_cap {
        let design = iid_design_with_rng(&density, n, measure, &mut rng)?;
        let certificate = leastsq::stability_constant(&design, &basis, m)?;
        if certificate.lambda_min >= 0.5 {
            return Ok(ConditionalDesign {
                design,
                certificate,
                draws: draw,
            });
        }
    }
    Err(Error::RedrawCapExceeded { cap: redraw_cap })
}

/// Sequential randomized construction with minimal oversampling: each point
/// is drawn from the positive part of a barrier-guided density
/// `rho_i(x) = b(x)* W_i b(x)` and weighted by `1/rho_i(x_i)`, where the
/// barrier matrix `W_i` is rebuilt from the accumulated design after every
/// step. Valid for any `n >= m >= 2`; the expected squared error of the
/// least-squares fit on the result is within `1 + (1 - 1/sqrt(r))^(-2)`
/// of the best approximation, with `r = n/(m-1)`.
pub fn randomized_greedy_design(
    basis: Arc<dyn Basis>,
    m: usize,
    n: usize,
    measure: &Measure,
    seed: u64,
) -> Result<SampledDesign> {
    if m < 2 {
        return Err(invalid("sequential construction needs m >= 2"));
    }
    if n < m {
        return Err(invalid(alloc::format!(
            "sequential construction needs n >= m (got n = {n}, m = {m})"
        )));
    }
    let sup_prefix_sq = basis.prefix_sup_sq(m).ok_or(Error::NoRejectionBound)?;
    let r = n as f64 / (m - 1) as f64;
    let step = 1.0 / r.sqrt();
    let mut rng = crate::rng_from_seed(seed);

    let identity = DMatrix::<Complex64>::identity(m, m);
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    let mut ell = -(m as f64);
    let mut b_vals = alloc::vec![Complex64::ZERO; m];
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);

    for _ in 0..n {
        let y = chol_inverse(&(&a - &identity * Complex64::new(ell, 0.0)))?;
        ell += step;
        let z = chol_inverse(&(&a - &identity * Complex64::new(ell, 0.0)))?;
        let trace_gap = real_trace(&z) - real_trace(&y);
        let w_mat = hermitize(&z * &z * Complex64::new(1.0 / trace_gap, 0.0) - &z);

        let (_, w_max) = eig_range(&w_mat);
        if !(w_max > 0.0) {
            return Err(invalid("barrier density vanished"));
        }
        let bound = w_max * sup_prefix_sq;

        use rand::Rng as _;
        let mut found = None;
        for _ in 0..DEFAULT_REJECTION_BUDGET {
            let x = measure.sample(&mut rng);
            basis.eval_block(0, &x, &mut b_vals);
            let rho = quad_form(&w_mat, &b_vals);
            if rho > 0.0 && rng.gen::<f64>() * bound <= rho {
                found = Some((x, rho));
                break;
            }
        }
        let (x, rho) = found.ok_or(Error::RejectionBudgetExceeded {
            budget: DEFAULT_REJECTION_BUDGET,
        })?;
        let w_i = 1.0 / rho;
        basis.eval_block(0, &x, &mut b_vals);
        add_outer(&mut a, w_i, &b_vals);
        points.push(x);
        weights.push(w_i);
    }
    SampledDesign::new(points, weights)
}

fn chol_inverse(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    Cholesky::new(hermitize(a.clone()))
        .map(|c| c.inverse())
        .ok_or_else(|| invalid("barrier matrix lost positive definiteness"))
}

fn real_trace(a: &DMatrix<Complex64>) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)].re).sum()
}
