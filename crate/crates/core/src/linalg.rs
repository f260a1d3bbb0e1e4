//! Small shared helpers around nalgebra for Hermitian matrices.

use crate::Complex64;
use nalgebra::{DMatrix, SymmetricEigen};

/// Force exact Hermitian symmetry, averaging away floating-point drift.
pub(crate) fn hermitize(mut a: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    for j in 0..n {
        a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
        for k in (j + 1)..n {
            let avg = (a[(j, k)] + a[(k, j)].conj()) * 0.5;
            a[(j, k)] = avg;
            a[(k, j)] = avg.conj();
        }
    }
    a
}

/// Extreme eigenvalues of a Hermitian matrix.
pub(crate) fn eig_range(a: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(a.clone());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in eig.eigenvalues.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    (lo, hi)
}

/// Real part of the quadratic form `v* A v` for Hermitian `A`.
pub(crate) fn quad_form(a: &DMatrix<Complex64>, v: &[Complex64]) -> f64 {
    let n = a.nrows();
    debug_assert_eq!(v.len(), n);
    let mut acc = Complex64::ZERO;
    for j in 0..n {
        let mut row = Complex64::ZERO;
        for k in 0..n {
            row += a[(j, k)] * v[k];
        }
        acc += v[j].conj() * row;
    }
    acc.re
}

/// Rank-one Hermitian update `a += w * v v*`.
pub(crate) fn add_outer(a: &mut DMatrix<Complex64>, w: f64, v: &[Complex64]) {
    let n = a.nrows();
    debug_assert_eq!(v.len(), n);
    for j in 0..n {
        let wj = v[j] * w;
        for k in 0..n {
            a[(j, k)] += wj * v[k].conj();
        }
    }
}
