//! Sparse recovery over a bounded orthonormal system: square-root Lasso
//! fitting and brute-force verification of the restricted isometry property
//! at desk scale.

use crate::error::{invalid, Error, Result};
use crate::linalg::hermitize;
use crate::model::{Basis, BasisDim, Point};
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// Default iteration cap of the square-root Lasso solver.
pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

/// Default cap on the number of supports enumerated by [`rip_check`].
pub const DEFAULT_SUPPORT_CAP: u64 = 5_000_000;

/// A sparse recovery problem: samples at `points` (unit weights, scaled by
/// `1/sqrt(n)` internally), a basis prefix of size `dim`, and the
/// regularization weight `lambda`.
pub struct SparseProblem {
    pub basis: Arc<dyn Basis>,
    pub dim: usize,
    pub points: Vec<Point>,
    pub lambda: f64,
}

impl SparseProblem {
    pub fn new(basis: Arc<dyn Basis>, dim: usize, points: Vec<Point>, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("sparse problem needs a basis prefix of size >= 1"));
        }
        if let BasisDim::Finite(d) = basis.dim() {
            if dim > d {
                return Err(Error::IndexOutOfRange {
                    index: dim - 1,
                    dim: d,
                });
            }
        }
        if points.is_empty() {
            return Err(invalid("sparse problem needs at least one sample point"));
        }
        if !(lambda > 0.0) {
            return Err(invalid("lambda must be positive"));
        }
        Ok(Self {
            basis,
            dim,
            points,
            lambda,
        })
    }

    /// The default regularization `lambda = 2 sqrt(m/n)` for target sparsity
    /// `m` and `n` sample points.
    pub fn with_default_lambda(
        basis: Arc<dyn Basis>,
        dim: usize,
        points: Vec<Point>,
        sparsity: usize,
    ) -> Result<Self> {
        let n = points.len();
        let lambda = 2.0 * (sparsity as f64 / n as f64).sqrt();
        Self::new(basis, dim, points, lambda)
    }

    /// The scaled sampling matrix `A[i][j] = b_j(x_i) / sqrt(n)`.
    fn sampling_matrix(&self) -> DMatrix<Complex64> {
        let n = self.points.len();
        let scale = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let mut a = DMatrix::zeros(n, self.dim);
        let mut row = alloc::vec![Complex64::ZERO; self.dim];
        for (i, x) in self.points.iter().enumerate() {
            self.basis.eval_block(0, x, &mut row);
            for j in 0..self.dim {
                a[(i, j)] = row[j] * scale;
            }
        }
        a
    }
}

/// Solution of the square-root Lasso problem.
#[derive(Debug, Clone)]
pub struct SqrtLassoSolution {
    pub coefficients: Vec<Complex64>,
    pub iterations: usize,
    /// Final value of `||z||_1 + lambda ||residual||_2` (unscaled samples).
    pub objective: f64,
    /// Objective value after every iteration, starting from the zero
    /// iterate; non-increasing by construction of the solver.
    pub objective_trace: Vec<f64>,
}

fn soft_threshold(z: Complex64, t: f64) -> Complex64 {
    let n = z.norm();
    if n <= t {
        Complex64::ZERO
    } else {
        z * ((n - t) / n)
    }
}

/// Minimize `||z||_1 + lambda * sqrt(sum_i |sum_j z_j b_j(x_i) - y_i|^2)`
/// over coefficient vectors `z`.
///
/// The solver alternates an exact update of the variational scale of the
/// misfit term with one proximal-gradient step at a fixed step rule, which
/// makes the objective non-increasing at every iteration. It stops when the
/// per-iteration decrease stays below `solver_tol`.
pub fn sqrt_lasso(
    values: &[Complex64],
    problem: &SparseProblem,
    solver_tol: f64,
) -> Result<SqrtLassoSolution> {
    sqrt_lasso_capped(values, problem, solver_tol, DEFAULT_MAX_ITERATIONS)
}

pub fn sqrt_lasso_capped(
    values: &[Complex64],
    problem: &SparseProblem,
    solver_tol: f64,
    max_iterations: usize,
) -> Result<SqrtLassoSolution> {
    let n = problem.points.len();
    if values.len() != n {
        return Err(invalid("one value per sample point required"));
    }
    let a = problem.sampling_matrix();
    let y = DVector::from_iterator(
        n,
        values
            .iter()
            .map(|v| v / Complex64::new((n as f64).sqrt(), 0.0)),
    );
    // kappa ||A z - y||_2 equals lambda * the unscaled misfit norm.
    let kappa = problem.lambda * (n as f64).sqrt();

    // Squared operator norm of A, for the step rule.
    let gram = hermitize(a.adjoint() * &a);
    let op_norm_sq = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(1e-300);

    let eta_floor = 1e-13;
    let objective = |z: &DVector<Complex64>| -> (f64, DVector<Complex64>) {
        let residual = &a * z - &y;
        let l1: f64 = z.iter().map(|c| c.norm()).sum();
        (l1 + kappa * residual.norm(), residual)
    };

    let mut z = DVector::<Complex64>::zeros(problem.dim);
    let (mut obj, mut residual) = objective(&z);
    let mut trace = alloc::vec![obj];
    let mut stall = 0usize;
    let mut last_decrease = f64::INFINITY;
    for iter in 0..max_iterations {
        let eta = residual.norm().max(eta_floor);
        // Proximal gradient step on the eta-smoothed misfit.
        let step = 0.99 * eta / (kappa * op_norm_sq);
        let grad = a.adjoint() * &residual * Complex64::new(kappa / eta, 0.0);
        let mut z_next = &z - grad * Complex64::new(step, 0.0);
        for c in z_next.iter_mut() {
            *c = soft_threshold(*c, step);
        }
        let (obj_next, residual_next) = objective(&z_next);
        last_decrease = obj - obj_next;
        z = z_next;
        residual = residual_next;
        obj = obj_next;
        trace.push(obj);
        if last_decrease.abs() < solver_tol {
            stall += 1;
            if stall >= 10 {
                return Ok(SqrtLassoSolution {
                    coefficients: z.iter().copied().collect(),
                    iterations: iter + 1,
                    objective: obj,
                    objective_trace: trace,
                });
            }
        } else {
            stall = 0;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        gap: last_decrease.abs(),
    })
}

/// Result of a brute-force restricted isometry check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipCheck {
    pub holds: bool,
    /// Smallest restricted Gram eigenvalue seen.
    pub min_eigenvalue: f64,
    /// Largest restricted Gram eigenvalue seen.
    pub max_eigenvalue: f64,
    pub supports_checked: u64,
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Verify by exhaustive enumeration that the empirical second moment
/// `(1/n) sum_i |g(x_i)|^2` stays within `[lower, upper] * ||g||_2^2` for
/// every `g` supported on `sparsity` of the first `dim` basis elements:
/// for each support the eigenvalues of the restricted Gram must lie in
/// `[lower, upper]`.
pub fn rip_check(
    points: &[Point],
    basis: &Arc<dyn Basis>,
    dim: usize,
    sparsity: usize,
    lower: f64,
    upper: f64,
    support_cap: u64,
) -> Result<RipCheck> {
    if sparsity == 0 || sparsity > dim {
        return Err(invalid("rip check needs 1 <= sparsity <= dim"));
    }
    let required = binomial(dim, sparsity).ok_or(Error::CombinatorialBudgetExceeded {
        required: u64::MAX,
        cap: support_cap,
    })?;
    if required > support_cap {
        return Err(Error::CombinatorialBudgetExceeded {
            required,
            cap: support_cap,
        });
    }

    let problem = SparseProblem::new(basis.clone(), dim, points.to_vec(), 1.0)?;
    let full_gram = hermitize({
        let a = problem.sampling_matrix();
        a.adjoint() * &a
    });

    let mut support: Vec<usize> = (0..sparsity).collect();
    let mut checked = 0u64;
    let mut min_eig = f64::INFINITY;
    let mut max_eig = f64::NEG_INFINITY;
    let mut sub = DMatrix::<Complex64>::zeros(sparsity, sparsity);
    loop {
        for (r, &jr) in support.iter().enumerate() {
            for (c, &jc) in support.iter().enumerate() {
                sub[(r, c)] = full_gram[(jr, jc)];
            }
        }
        let eig = SymmetricEigen::new(sub.clone());
        for v in eig.eigenvalues.iter() {
            min_eig = min_eig.min(*v);
            max_eig = max_eig.max(*v);
        }
        checked += 1;
        if min_eig < lower - 1e-12 || max_eig > upper + 1e-12 {
            return Ok(RipCheck {
                holds: false,
                min_eigenvalue: min_eig,
                max_eigenvalue: max_eig,
                supports_checked: checked,
            });
        }
        // Next support in lexicographic order.
        let mut i = sparsity;
        loop {
            if i == 0 {
                return Ok(RipCheck {
                    holds: true,
                    min_eigenvalue: min_eig,
                    max_eigenvalue: max_eig,
                    supports_checked: checked,
                });
            }
            i -= 1;
            if support[i] != i + dim - sparsity {
                support[i] += 1;
                for j in (i + 1)..sparsity {
                    support[j] = support[j - 1] + 1;
                }
                break;
            }
        }
    }
}
