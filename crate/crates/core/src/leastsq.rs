//! Weighted least-squares fitting, Gram and stability diagnostics,
//! discretization verification, hyperinterpolation and error measurement.
//!
//! The discrete objects all derive from the scaled evaluation matrix
//! `M[i][k] = sqrt(w_i) * b_k(x_i)`: the Gram matrix is `G = M* M`, fitting
//! solves `min ||M c - y||` through an orthogonal factorization of `M`, and
//! hyperinterpolation applies `M*` directly.

use crate::error::{invalid, Error, Result};
use crate::linalg::{eig_range, hermitize};
use crate::model::{Basis, Measure, Point, SampledDesign, TargetFunction};
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SVD};
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// Relative spectral gate below which a design is refused for fitting.
pub const DEFAULT_SINGULARITY_TOL: f64 = 1e-10;

/// The Hermitian Gram matrix `G[j][k] = <b_k, b_j>` under the design's
/// weighted point measure.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Extreme eigenvalues (real; the matrix is Hermitian PSD up to rounding).
    pub fn eig_range(&self) -> (f64, f64) {
        eig_range(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.entries[(j, j)].re).sum()
    }
}

/// Eigenvalue bounds of a Gram-type matrix proving a discretization
/// inequality held, together with the implied stability constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCertificate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `lambda_min^(-1/2)` for L2 error over an orthonormal basis;
    /// infinite when the Gram matrix is singular.
    pub stability_k: f64,
}

impl SpectralCertificate {
    pub fn from_eigs(lambda_min: f64, lambda_max: f64) -> Self {
        let stability_k = if lambda_min > 0.0 {
            1.0 / lambda_min.sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            lambda_min,
            lambda_max,
            stability_k,
        }
    }
}

/// Coefficients over a basis prefix plus the design that produced them.
#[derive(Clone)]
pub struct FittedApproximant {
    coefficients: Vec<Complex64>,
    basis: Arc<dyn Basis>,
    design: SampledDesign,
}

impl FittedApproximant {
    pub fn new(coefficients: Vec<Complex64>, basis: Arc<dyn Basis>, design: SampledDesign) -> Self {
        Self {
            coefficients,
            basis,
            design,
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &Arc<dyn Basis> {
        &self.basis
    }

    pub fn design(&self) -> &SampledDesign {
        &self.design
    }

    pub fn eval(&self, x: &Point) -> Complex64 {
        let mut vals = alloc::vec![Complex64::ZERO; self.coefficients.len()];
        self.basis.eval_block(0, x, &mut vals);
        self.coefficients
            .iter()
            .zip(&vals)
            .map(|(c, b)| c * b)
            .sum()
    }
}

impl core::fmt::Debug for FittedApproximant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FittedApproximant")
            .field("m", &self.coefficients.len())
            .field("n", &self.design.len())
            .finish()
    }
}

/// The scaled evaluation matrix `M[i][k] = sqrt(w_i) b_k(x_i)`.
fn evaluation_matrix(design: &SampledDesign, basis: &dyn Basis, m: usize) -> DMatrix<Complex64> {
    let n = design.len();
    let mut mat = DMatrix::zeros(n, m);
    let mut row = alloc::vec![Complex64::ZERO; m];
    for (i, (x, w)) in design.iter().enumerate() {
        basis.eval_block(0, x, &mut row);
        let sw = w.sqrt();
        for k in 0..m {
            mat[(i, k)] = row[k] * sw;
        }
    }
    mat
}

fn scaled_values(design: &SampledDesign, values: &[Complex64]) -> Result<DVector<Complex64>> {
    if values.len() != design.len() {
        return Err(invalid(alloc::format!(
            "{} values for a design of {} points",
            values.len(),
            design.len()
        )));
    }
    Ok(DVector::from_iterator(
        design.len(),
        design
            .weights()
            .iter()
            .zip(values)
            .map(|(w, v)| v * w.sqrt()),
    ))
}

/// Gram matrix of the first `m` basis elements under the design.
pub fn gram(design: &SampledDesign, basis: &dyn Basis, m: usize) -> Result<GramMatrix> {
    if m == 0 {
        return Err(invalid("gram needs m >= 1"));
    }
    let mat = evaluation_matrix(design, basis, m);
    Ok(GramMatrix {
        entries: hermitize(mat.adjoint() * &mat),
    })
}

/// A reusable orthogonal factorization of the scaled evaluation matrix.
///
/// Factorizing once and fitting many value vectors separates the offline
/// cost (the factorization) from the online cost (one matrix-vector
/// product per value vector). The factorization is immutable and can be
/// shared across threads.
pub struct LsFactorization {
    svd: SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    certificate: SpectralCertificate,
    basis: Arc<dyn Basis>,
    design: SampledDesign,
}

impl LsFactorization {
    /// Factorize the design. Fails with [`Error::IllPosedDesign`] when the
    /// relative spectral gap `lambda_min(G)/lambda_max(G)` is at most `tol`,
    /// i.e. when the discretization inequality fails on the prefix space.
    pub fn new(design: &SampledDesign, basis: Arc<dyn Basis>, m: usize, tol: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("fit needs m >= 1"));
        }
        let mat = evaluation_matrix(design, &basis, m);
        let svd = SVD::new(mat, true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .min(smax);
        // Rank deficiency for n < m never shows up in the thin SVD, which has
        // only min(n, m) singular values.
        let smin = if design.len() < m { 0.0 } else { smin };
        let gap = if smax > 0.0 {
            (smin / smax) * (smin / smax)
        } else {
            0.0
        };
        if gap <= tol {
            return Err(Error::IllPosedDesign { gap, tol });
        }
        let certificate = SpectralCertificate::from_eigs(smin * smin, smax * smax);
        Ok(Self {
            svd,
            certificate,
            basis,
            design: design.clone(),
        })
    }

    pub fn certificate(&self) -> SpectralCertificate {
        self.certificate
    }

    /// Solve the weighted least-squares problem for one value vector.
    pub fn fit(&self, values: &[Complex64]) -> Result<FittedApproximant> {
        let y = scaled_values(&self.design, values)?;
        let c = self
            .svd
            .solve(&y, 0.0)
            .map_err(|e| invalid(alloc::format!("svd solve failed: {e}")))?;
        Ok(FittedApproximant {
            coefficients: c.iter().copied().collect(),
            basis: self.basis.clone(),
            design: self.design.clone(),
        })
    }
}

/// Weighted least-squares fit of sampled values onto the first `m` basis
/// elements: the coefficients minimize `sum_i w_i |f(x_i) - sum_k c_k b_k(x_i)|^2`.
pub fn fit(
    values: &[Complex64],
    design: &SampledDesign,
    basis: Arc<dyn Basis>,
    m: usize,
    tol: f64,
) -> Result<FittedApproximant> {
    LsFactorization::new(design, basis, m, tol)?.fit(values)
}

/// Stability certificate of the design on the prefix space: extreme Gram
/// eigenvalues and the constant `K = sigma_min(G)^(-1/2)` of the
/// discretization inequality for L2 over an orthonormal basis.
pub fn stability_constant(
    design: &SampledDesign,
    basis: &dyn Basis,
    m: usize,
) -> Result<SpectralCertificate> {
    let g = gram(design, basis, m)?;
    let (lo, hi) = g.eig_range();
    Ok(SpectralCertificate::from_eigs(lo, hi))
}

/// Explicit coefficient estimator `c_k = <f, b_k>` under the discrete inner
/// product. Coincides with [`fit`] exactly when the design discretizes the
/// prefix space exactly (Gram = identity), and is cheaper: no factorization.
pub fn hyperinterpolate(
    values: &[Complex64],
    design: &SampledDesign,
    basis: Arc<dyn Basis>,
    m: usize,
) -> Result<FittedApproximant> {
    if m == 0 {
        return Err(invalid("hyperinterpolate needs m >= 1"));
    }
    let mat = evaluation_matrix(design, &basis, m);
    let y = scaled_values(design, values)?;
    let c = mat.adjoint() * y;
    Ok(FittedApproximant {
        coefficients: c.iter().copied().collect(),
        basis,
        design: design.clone(),
    })
}

/// Monte Carlo estimate of `||f - approx||_p` under the measure, for
/// `p in [1, inf]`. For `p = inf` the maximum over the draws is returned.
/// Deterministic given the seed.
pub fn lp_error(
    f: &dyn TargetFunction,
    approx: &dyn Fn(&Point) -> Complex64,
    p: f64,
    measure: &Measure,
    mc_budget: usize,
    seed: u64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("lp_error needs p >= 1"));
    }
    let mut rng = crate::rng_from_seed(seed);
    if p.is_infinite() {
        let mut worst = 0.0f64;
        for _ in 0..mc_budget {
            let x = measure.sample(&mut rng);
            worst = worst.max((f.eval(&x) - approx(&x)).norm());
        }
        return Ok(worst);
    }
    let mut acc = 0.0f64;
    for _ in 0..mc_budget {
        let x = measure.sample(&mut rng);
        acc += (f.eval(&x) - approx(&x)).norm().powf(p);
    }
    Ok((acc / mc_budget as f64).powf(1.0 / p))
}

/// Check the two-sided discretization inequality on the prefix space:
/// `lambda_min(G) >= lower^2`, and `lambda_max(G) <= upper^2` when an upper
/// factor is given.
pub fn check_discretization(
    design: &SampledDesign,
    basis: &dyn Basis,
    m: usize,
    lower: f64,
    upper: Option<f64>,
) -> Result<(bool, SpectralCertificate)> {
    let cert = stability_constant(design, basis, m)?;
    let mut ok = cert.lambda_min >= lower * lower - 1e-12;
    if let Some(u) = upper {
        ok &= cert.lambda_max <= u * u + 1e-12;
    }
    Ok((ok, cert))
}

/// Equispaced circle design `{i/n}` with weights `1/n`; discretizes trig
/// prefixes of dimension `m <= n` exactly.
pub fn equispaced_circle_design(n: usize) -> SampledDesign {
    let points = (0..n).map(|i| Point::d1(i as f64 / n as f64)).collect();
    SampledDesign::equal_weights(points).expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, Expansion, TrigBasis};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn trig() -> Arc<dyn Basis> {
        Arc::new(TrigBasis)
    }

    #[test]
    fn equispaced_gram_is_identity() {
        for (m, n) in [(1usize, 1usize), (4, 4), (5, 8), (8, 16)] {
            let g = gram(&equispaced_circle_design(n), &TrigBasis, m).unwrap();
            for j in 0..m {
                for k in 0..m {
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!(
                        (g.entries()[(j, k)] - Complex64::new(want, 0.0)).norm() < 1e-12,
                        "G[{j}][{k}] = {}",
                        g.entries()[(j, k)]
                    );
                }
            }
        }
    }

    #[test]
    fn single_point_constant_gram() {
        let design = SampledDesign::new(alloc::vec![Point::d1(0.3)], alloc::vec![1.0]).unwrap();
        let g = gram(&design, &TrigBasis, 1).unwrap();
        assert_abs_diff_eq!(g.entries()[(0, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coincident_points_are_rank_one() {
        let design = SampledDesign::new(
            alloc::vec![Point::d1(0.4), Point::d1(0.4)],
            alloc::vec![0.5, 0.5],
        )
        .unwrap();
        let g = gram(&design, &TrigBasis, 2).unwrap();
        let (lo, hi) = g.eig_range();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_recovers_members_of_the_space() {
        let m = 7;
        let f = Expansion::with_decay(trig(), 1.0, m, 21);
        let design = equispaced_circle_design(16);
        let values: Vec<Complex64> = design.points().iter().map(|x| f.eval(x)).collect();
        let fitted = fit(&values, &design, trig(), m, DEFAULT_SINGULARITY_TOL).unwrap();
        let norm: f64 = f.coefficients().iter().map(|c| c.norm_sqr()).sum();
        let err: f64 = fitted
            .coefficients()
            .iter()
            .zip(f.coefficients())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!(err.sqrt() / norm.sqrt() < 1e-10, "relative error {err:e}");
    }

    #[test]
    fn fit_of_zero_is_zero() {
        let design = equispaced_circle_design(9);
        let values = alloc::vec![Complex64::ZERO; 9];
        let fitted = fit(&values, &design, trig(), 4, DEFAULT_SINGULARITY_TOL).unwrap();
        for c in fitted.coefficients() {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn underdetermined_fit_is_refused() {
        let design = SampledDesign::new(alloc::vec![Point::d1(0.1)], alloc::vec![1.0]).unwrap();
        let err = fit(
            &[Complex64::new(1.0, 0.0)],
            &design,
            trig(),
            2,
            DEFAULT_SINGULARITY_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IllPosedDesign { .. }));
    }

    #[test]
    fn stability_of_identity_and_quarter_gram() {
        let cert = stability_constant(&equispaced_circle_design(8), &TrigBasis, 8).unwrap();
        assert_abs_diff_eq!(cert.stability_k, 1.0, epsilon = 1e-9);

        // Antipodal points with weights a, b give Gram eigenvalues 2a and 2b
        // on the first two trig elements; pick {1, 1/4}.
        let design = SampledDesign::new(
            alloc::vec![Point::d1(0.0), Point::d1(0.5)],
            alloc::vec![0.5, 0.125],
        )
        .unwrap();
        let cert = stability_constant(&design, &TrigBasis, 2).unwrap();
        assert_abs_diff_eq!(cert.lambda_min, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.stability_k, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn rank_deficient_design_flags_infinite_k() {
        let design = SampledDesign::new(alloc::vec![Point::d1(0.2)], alloc::vec![1.0]).unwrap();
        let cert = stability_constant(&design, &TrigBasis, 3).unwrap();
        assert_abs_diff_eq!(cert.lambda_min, 0.0, epsilon = 1e-12);
        assert!(cert.stability_k.is_infinite());
    }

    #[test]
    fn hyperinterpolation_matches_fit_on_exact_designs() {
        let m = 5;
        let n = 16;
        let design = equispaced_circle_design(n);
        let f = Expansion::with_decay(trig(), 1.2, 40, 3);
        let values: Vec<Complex64> = design.points().iter().map(|x| f.eval(x)).collect();
        let a = fit(&values, &design, trig(), m, DEFAULT_SINGULARITY_TOL).unwrap();
        let b = hyperinterpolate(&values, &design, trig(), m).unwrap();
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn hyperinterpolation_of_constant_on_exact_design() {
        let design = equispaced_circle_design(8);
        let values = alloc::vec![Complex64::new(1.0, 0.0); 8];
        let h = hyperinterpolate(&values, &design, trig(), 4).unwrap();
        assert_abs_diff_eq!(
            (h.coefficients()[0] - Complex64::new(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
        for c in &h.coefficients()[1..] {
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn hyperinterpolation_differs_from_fit_on_random_points() {
        let mut rng = crate::rng_from_seed(5);
        use rand::Rng as _;
        let points: Vec<Point> = (0..24).map(|_| Point::d1(rng.gen::<f64>())).collect();
        let design = SampledDesign::equal_weights(points).unwrap();
        let f = Expansion::with_decay(trig(), 1.2, 40, 3);
        let values: Vec<Complex64> = design.points().iter().map(|x| f.eval(x)).collect();
        let a = fit(&values, &design, trig(), 5, DEFAULT_SINGULARITY_TOL).unwrap();
        let b = hyperinterpolate(&values, &design, trig(), 5).unwrap();
        let diff: f64 = a
            .coefficients()
            .iter()
            .zip(b.coefficients())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff > 1e-6, "difference {diff} unexpectedly small");
    }

    #[test]
    fn lp_error_of_exact_fit_is_zero() {
        let f = Expansion::with_decay(trig(), 1.0, 4, 2);
        let measure = Measure::uniform(Domain::Circle);
        let approx = |x: &Point| f.eval(x);
        let e = lp_error(&f, &approx, 2.0, &measure, 1000, 7).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn lp_error_of_constant_gap_is_the_constant() {
        let f = |_: &Point| Complex64::new(0.75, 0.0);
        let zero = |_: &Point| Complex64::ZERO;
        let measure = Measure::uniform(Domain::Circle);
        for p in [1.0, 2.0, 5.0, f64::INFINITY] {
            let e = lp_error(&f, &zero, p, &measure, 500, 7).unwrap();
            assert_abs_diff_eq!(e, 0.75, epsilon = 1e-12);
        }
    }

    #[test]
    fn discretization_check_on_exact_and_deficient_designs() {
        let design = equispaced_circle_design(8);
        let (ok, _) = check_discretization(&design, &TrigBasis, 8, 1.0, Some(1.0)).unwrap();
        assert!(ok);

        let bad = SampledDesign::new(
            alloc::vec![Point::d1(0.1), Point::d1(0.1)],
            alloc::vec![0.5, 0.5],
        )
        .unwrap();
        let (ok, _) = check_discretization(&bad, &TrigBasis, 2, 0.1, None).unwrap();
        assert!(!ok);
    }

    #[test]
    fn gram_eigs_match_squared_singular_values() {
        let mut rng = crate::rng_from_seed(12);
        use rand::Rng as _;
        let points: Vec<Point> = (0..20).map(|_| Point::d1(rng.gen::<f64>())).collect();
        let weights: Vec<f64> = (0..20).map(|_| 0.01 + rng.gen::<f64>()).collect();
        let design = SampledDesign::new(points, weights).unwrap();
        let g = gram(&design, &TrigBasis, 6).unwrap();
        let (lo, hi) = g.eig_range();
        let fact = LsFactorization::new(&design, trig(), 6, 1e-14).unwrap();
        let cert = fact.certificate();
        assert!((cert.lambda_min - lo).abs() <= 1e-9 * hi.abs());
        assert!((cert.lambda_max - hi).abs() <= 1e-9 * hi.abs());
    }

    #[test]
    fn error_bound_from_stability_and_discrete_residual() {
        // For any competitor g in the prefix space, the L2 error of the fit
        // is at most ||f - g||_2 + K ||f - g|| in the design's seminorm.
        let mut rng = crate::rng_from_seed(61);
        use rand::Rng as _;
        let points: Vec<Point> = (0..40).map(|_| Point::d1(rng.gen::<f64>())).collect();
        let design = SampledDesign::equal_weights(points).unwrap();
        let m = 6;
        let cert = stability_constant(&design, &TrigBasis, m).unwrap();
        let f = Expansion::with_decay(trig(), 1.0, 128, 19);
        let values: Vec<Complex64> = design.points().iter().map(|x| f.eval(x)).collect();
        let fitted = fit(&values, &design, trig(), m, 1e-12).unwrap();
        let fit_error = f.l2_error_sq_vs(fitted.coefficients()).sqrt();
        for g_len in [1usize, 3, m] {
            // Competitor: the truncation of f to g_len coefficients.
            let g = &f.coefficients()[..g_len];
            let best = f.l2_error_sq_vs(g).sqrt();
            let residual: Vec<Complex64> = design
                .points()
                .iter()
                .zip(&values)
                .map(|(x, v)| {
                    let mut row = alloc::vec![Complex64::ZERO; g_len];
                    TrigBasis.eval_block(0, x, &mut row);
                    v - g.iter().zip(&row).map(|(c, b)| c * b).sum::<Complex64>()
                })
                .collect();
            let discrete = design.discrete_norm(&residual);
            assert!(
                fit_error <= best + cert.stability_k * discrete + 1e-9,
                "g_len {g_len}: {fit_error} vs {best} + {} * {discrete}",
                cert.stability_k
            );
        }
    }

    #[test]
    fn mc_error_agrees_with_the_exact_radius_oracle() {
        // The distance function to a circle design is its own worst case;
        // the Monte Carlo L_p estimator must reproduce the closed form.
        use crate::lipschitz::{exact_radius, CircleDesign};
        let circle_design = CircleDesign::new(alloc::vec![0.13, 0.42, 0.7, 0.71, 0.95]).unwrap();
        let f = |x: &Point| Complex64::new(circle_design.dist_to(x.x()), 0.0);
        let zero = |_: &Point| Complex64::ZERO;
        let measure = Measure::uniform(Domain::Circle);
        let budget = 200_000;
        for p in [1.0, 2.0] {
            let mc = lp_error(&f, &zero, p, &measure, budget, 5).unwrap();
            let exact = exact_radius(&circle_design, p).unwrap();
            // Standard error of the p-th power mean, propagated through the
            // p-th root, stays below ~1e-3 at this budget; allow 3x.
            let rel_se = 3.0 / (budget as f64).sqrt();
            assert!(
                (mc - exact).abs() <= 3.0 * rel_se * exact + 1e-6,
                "p = {p}: MC {mc} vs exact {exact}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Linearity of the fit in the data, on a fixed well-posed design.
        #[test]
        fn fit_is_linear(seed in 0u64..500, alpha_re in -2.0..2.0f64, beta_im in -2.0..2.0f64) {
            let design = equispaced_circle_design(12);
            let m = 5;
            let fact = LsFactorization::new(&design, trig(), m, 1e-12).unwrap();
            let f1 = Expansion::with_decay(trig(), 1.0, 30, seed);
            let f2 = Expansion::with_decay(trig(), 1.5, 30, seed + 1);
            let alpha = Complex64::new(alpha_re, 0.3);
            let beta = Complex64::new(0.1, beta_im);
            let y1: Vec<Complex64> = design.points().iter().map(|x| f1.eval(x)).collect();
            let y2: Vec<Complex64> = design.points().iter().map(|x| f2.eval(x)).collect();
            let combo: Vec<Complex64> = y1.iter().zip(&y2).map(|(a, b)| alpha * a + beta * b).collect();
            let c1 = fact.fit(&y1).unwrap();
            let c2 = fact.fit(&y2).unwrap();
            let cc = fact.fit(&combo).unwrap();
            let scale: f64 = cc.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-9);
            for k in 0..m {
                let expect = alpha * c1.coefficients()[k] + beta * c2.coefficients()[k];
                prop_assert!((cc.coefficients()[k] - expect).norm() / scale < 1e-9);
            }
        }
    }
}
