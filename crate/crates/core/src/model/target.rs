//! Target functions to be recovered from samples.

use super::basis::Basis;
use super::domain::Point;
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// A function to be recovered. Evaluation must be deterministic: repeated
/// calls at the same point return the same value.
pub trait TargetFunction: Send + Sync {
    fn eval(&self, x: &Point) -> Complex64;

    /// Exact expansion coefficients over a basis, when known (synthetic
    /// targets used for verification).
    fn exact_coefficients(&self) -> Option<&[Complex64]> {
        None
    }
}

impl<F> TargetFunction for F
where
    F: Fn(&Point) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: &Point) -> Complex64 {
        self(x)
    }
}

/// A finite expansion `sum_k c_k b_k` with known coefficients.
#[derive(Clone)]
pub struct Expansion {
    basis: Arc<dyn Basis>,
    coefficients: Vec<Complex64>,
}

impl Expansion {
    pub fn new(basis: Arc<dyn Basis>, coefficients: Vec<Complex64>) -> Self {
        Self {
            basis,
            coefficients,
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &Arc<dyn Basis> {
        &self.basis
    }

    /// Exact squared L2 distance to the projection onto the first `m`
    /// elements: the tail energy `sum_{k>=m} |c_k|^2` (orthonormal basis).
    pub fn projection_error_sq(&self, m: usize) -> f64 {
        self.coefficients.iter().skip(m).map(|c| c.norm_sqr()).sum()
    }

    /// Exact squared L2 norm of the expansion.
    pub fn norm_sq(&self) -> f64 {
        self.projection_error_sq(0)
    }

    /// Exact squared L2 error of an approximant given by coefficients over
    /// the first `approx.len()` basis elements.
    pub fn l2_error_sq_vs(&self, approx: &[Complex64]) -> f64 {
        let mut err = 0.0;
        let overlap = approx.len().min(self.coefficients.len());
        for (c, a) in self.coefficients[..overlap].iter().zip(&approx[..overlap]) {
            err += (c - a).norm_sqr();
        }
        for c in &self.coefficients[overlap..] {
            err += c.norm_sqr();
        }
        for a in &approx[overlap..] {
            err += a.norm_sqr();
        }
        err
    }

    /// Coefficients with magnitudes chosen so that the squared tail energy
    /// beyond `m` equals `m^(-2*alpha)` for every `m < len`, i.e. the best
    /// L2 approximation from the prefix spaces decays exactly like `m^-alpha`
    /// (up to the truncation at `len`). Signs/phases are drawn from the seed.
    pub fn with_decay(basis: Arc<dyn Basis>, alpha: f64, len: usize, seed: u64) -> Self {
        use rand::Rng as _;
        let mut rng = crate::rng_from_seed(seed);
        let mut coefficients = Vec::with_capacity(len);
        coefficients.push(Complex64::new(1.0, 0.0));
        for k in 1..len {
            // |c_k|^2 = k^(-2a) - (k+1)^(-2a) so that sums telescope.
            let mag = ((k as f64).powf(-2.0 * alpha) - ((k + 1) as f64).powf(-2.0 * alpha)).sqrt();
            let phase = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
            coefficients.push(Complex64::new(phase.cos(), phase.sin()) * mag);
        }
        Self::new(basis, coefficients)
    }
}

impl TargetFunction for Expansion {
    fn eval(&self, x: &Point) -> Complex64 {
        let mut vals = alloc::vec![Complex64::ZERO; self.coefficients.len()];
        self.basis.eval_block(0, x, &mut vals);
        self.coefficients
            .iter()
            .zip(&vals)
            .map(|(c, b)| c * b)
            .sum()
    }

    fn exact_coefficients(&self) -> Option<&[Complex64]> {
        Some(&self.coefficients)
    }
}
