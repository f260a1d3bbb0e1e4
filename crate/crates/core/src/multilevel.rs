//! Multilevel Monte Carlo estimation of expansion coefficients.
//!
//! Level `s` draws `n_s = r 2^s` i.i.d. points from the prefix density of
//! dimension `m_s = 2^s` and applies a plain Monte Carlo estimator to the
//! coefficients of the residual against the approximant built from levels
//! below. Residual values are recomputed from the current coefficient
//! prefix, never from stored past samples, so the total evaluation budget is
//! exactly `sum_s r 2^s <= r 2^(k+1)`.

use crate::error::{invalid, Result};
use crate::leastsq::FittedApproximant;
use crate::model::{Basis, Measure, Point, SampledDesign, TargetFunction};
use crate::random_designs::{christoffel_density, DEFAULT_REJECTION_BUDGET};
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Configuration of the multilevel estimator.
pub struct MlConfig {
    /// Oversampling factor per level, `>= 1`.
    pub r: usize,
    /// Top level; the output has `2^k` coefficients.
    pub k: usize,
    pub basis: Arc<dyn Basis>,
}

/// One level of the estimator: draw `n_s` points from the prefix density of
/// dimension `m_s` and return the Monte Carlo estimate of the residual's
/// leading `m_s` coefficients, together with the drawn points and their
/// self-normalizing weights.
pub fn level_residual_estimate(
    f: &dyn TargetFunction,
    current: &[Complex64],
    basis: &Arc<dyn Basis>,
    measure: &Measure,
    m_s: usize,
    n_s: usize,
    rng: &mut crate::Rng,
) -> Result<(Vec<Complex64>, Vec<Point>, Vec<f64>)> {
    let density = christoffel_density(basis.clone(), m_s)?;
    let mut estimate = alloc::vec![Complex64::ZERO; m_s];
    let mut row = alloc::vec![Complex64::ZERO; m_s];
    let mut points = Vec::with_capacity(n_s);
    let mut weights = Vec::with_capacity(n_s);
    for _ in 0..n_s {
        let (x, rho) = density.sample(measure, rng, DEFAULT_REJECTION_BUDGET)?;
        basis.eval_block(0, &x, &mut row);
        let predicted: Complex64 = current[..m_s.min(current.len())]
            .iter()
            .zip(&row)
            .map(|(c, b)| c * b)
            .sum();
        let residual = (f.eval(&x) - predicted) / rho;
        for (slot, b) in estimate.iter_mut().zip(&row) {
            *slot += residual * b.conj();
        }
        points.push(x);
        weights.push(1.0 / (n_s as f64 * rho));
    }
    let scale = Complex64::new(1.0 / n_s as f64, 0.0);
    for slot in estimate.iter_mut() {
        *slot *= scale;
    }
    Ok((estimate, points, weights))
}

/// Run the multilevel estimator. The returned approximant holds the
/// estimated coefficients over the first `2^k` basis elements and, as its
/// design, the log of all sampled points with their per-level weights.
pub fn ml_recover(
    f: &dyn TargetFunction,
    config: &MlConfig,
    measure: &Measure,
    seed: u64,
) -> Result<FittedApproximant> {
    if config.r == 0 {
        return Err(invalid("multilevel estimator needs r >= 1"));
    }
    let m = 1usize << config.k;
    let mut coefficients = alloc::vec![Complex64::ZERO; m];
    let mut rng = crate::rng_from_seed(seed);
    let mut all_points = Vec::new();
    let mut all_weights = Vec::new();
    for s in 0..=config.k {
        let m_s = 1usize << s;
        let n_s = config.r * m_s;
        let (update, points, weights) =
            level_residual_estimate(f, &coefficients, &config.basis, measure, m_s, n_s, &mut rng)?;
        for (c, u) in coefficients.iter_mut().zip(&update) {
            *c += u;
        }
        all_points.extend(points);
        all_weights.extend(weights);
    }
    Ok(FittedApproximant::new(
        coefficients,
        config.basis.clone(),
        SampledDesign::new(all_points, all_weights)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, Expansion, TrigBasis};
    use core::sync::atomic::{AtomicUsize, Ordering};

    fn trig() -> Arc<dyn Basis> {
        Arc::new(TrigBasis)
    }

    fn circle() -> Measure {
        Measure::uniform(Domain::Circle)
    }

    struct CountingTarget<'a> {
        inner: &'a dyn TargetFunction,
        calls: AtomicUsize,
    }

    impl TargetFunction for CountingTarget<'_> {
        fn eval(&self, x: &Point) -> Complex64 {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.inner.eval(x)
        }
    }

    #[test]
    fn constant_multiple_of_b0_is_recovered_exactly() {
        // The level-0 integrand (f conj(b_0)) / rho is constant for the trig
        // basis, so the estimator has zero variance at every level.
        let c = Complex64::new(0.7, -0.3);
        let f = Expansion::new(trig(), alloc::vec![c]);
        let config = MlConfig {
            r: 2,
            k: 3,
            basis: trig(),
        };
        let out = ml_recover(&f, &config, &circle(), 5).unwrap();
        assert!((out.coefficients()[0] - c).norm() < 1e-12);
        for tail in &out.coefficients()[1..] {
            assert!(tail.norm() < 1e-12, "tail coefficient {tail}");
        }
    }

    #[test]
    fn zero_function_gives_zero_coefficients() {
        let f = |_: &Point| Complex64::ZERO;
        let config = MlConfig {
            r: 1,
            k: 4,
            basis: trig(),
        };
        let out = ml_recover(&f, &config, &circle(), 9).unwrap();
        assert!(out.coefficients().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn sample_budget_is_exact() {
        let f = Expansion::with_decay(trig(), 1.0, 64, 4);
        let counted = CountingTarget {
            inner: &f,
            calls: AtomicUsize::new(0),
        };
        let (r, k) = (3usize, 4usize);
        let config = MlConfig {
            r,
            k,
            basis: trig(),
        };
        let out = ml_recover(&counted, &config, &circle(), 17).unwrap();
        let expect: usize = (0..=k).map(|s| r << s).sum();
        assert_eq!(counted.calls.load(Ordering::Relaxed), expect);
        assert_eq!(out.design().len(), expect);
        assert!(expect <= r << (k + 1));
    }

    #[test]
    fn level_bracket_is_conditionally_unbiased() {
        // Freeze the lower-level state, estimate the level-s bracket many
        // times, and compare its mean with the exact residual coefficients.
        let f = Expansion::with_decay(trig(), 1.0, 128, 31);
        let basis = trig();
        let measure = circle();
        let mut rng = crate::rng_from_seed(2);
        // A frozen (arbitrary) lower-level state.
        let current: Vec<Complex64> = f.coefficients()[..4]
            .iter()
            .map(|c| c * Complex64::new(0.9, 0.05))
            .collect();
        let (m_s, n_s) = (8usize, 16usize);
        let trials = 2000;
        let mut mean = alloc::vec![Complex64::ZERO; m_s];
        let mut var = alloc::vec![0.0f64; m_s];
        let mut samples = Vec::with_capacity(trials);
        for _ in 0..trials {
            let (est, _, _) =
                level_residual_estimate(&f, &current, &basis, &measure, m_s, n_s, &mut rng)
                    .unwrap();
            for (m, e) in mean.iter_mut().zip(&est) {
                *m += e;
            }
            samples.push(est);
        }
        for m in mean.iter_mut() {
            *m /= trials as f64;
        }
        for est in &samples {
            for (v, (e, m)) in var.iter_mut().zip(est.iter().zip(&mean)) {
                *v += (e - m).norm_sqr();
            }
        }
        for j in 0..m_s {
            // Exact residual coefficient of f - (current approximant).
            let exact = f.coefficients()[j] - current.get(j).copied().unwrap_or(Complex64::ZERO);
            let se = (var[j] / (trials as f64 * (trials - 1) as f64)).sqrt();
            assert!(
                (mean[j] - exact).norm() <= 4.0 * se + 1e-12,
                "coefficient {j}: mean {} vs exact {} (se {se})",
                mean[j],
                exact
            );
        }
    }
}
