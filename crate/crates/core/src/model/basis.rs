//! Indexed families of scalar functions with an orthonormality contract.

use super::domain::{Measure, Point};
use crate::error::{Error, Result};
use crate::Complex64;
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// Dimension of a basis family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisDim {
    Finite(usize),
    Unbounded,
}

impl BasisDim {
    pub fn contains(&self, k: usize) -> bool {
        match self {
            BasisDim::Finite(d) => k < *d,
            BasisDim::Unbounded => true,
        }
    }
}

/// An indexed family `b_0, b_1, ...` of scalar functions on a domain,
/// orthonormal against a reference measure.
///
/// Index ordering is fixed per family and part of the contract: every
/// prefix space `V_m = span{b_k : k < m}` depends on it. Scalars are complex
/// throughout; real families return values with zero imaginary part.
pub trait Basis: Send + Sync {
    fn eval(&self, k: usize, x: &Point) -> Complex64;

    fn dim(&self) -> BasisDim;

    /// Uniform bound with `max_k ||b_k||_inf <= theta`, when one exists.
    fn theta(&self) -> Option<f64> {
        None
    }

    /// Upper bound for `sup_x sum_{k<m} |b_k(x)|^2`, used for rejection
    /// sampling from prefix densities. Defaults to `m * theta^2`.
    fn prefix_sup_sq(&self, m: usize) -> Option<f64> {
        self.theta().map(|t| m as f64 * t * t)
    }

    /// Evaluate `b_k(x)` for `k` in `start..start + out.len()`.
    fn eval_block(&self, start: usize, x: &Point, out: &mut [Complex64]) {
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.eval(start + j, x);
        }
    }
}

impl Basis for Arc<dyn Basis> {
    fn eval(&self, k: usize, x: &Point) -> Complex64 {
        (**self).eval(k, x)
    }
    fn dim(&self) -> BasisDim {
        (**self).dim()
    }
    fn theta(&self) -> Option<f64> {
        (**self).theta()
    }
    fn prefix_sup_sq(&self, m: usize) -> Option<f64> {
        (**self).prefix_sup_sq(m)
    }
    fn eval_block(&self, start: usize, x: &Point, out: &mut [Complex64]) {
        (**self).eval_block(start, x, out)
    }
}

/// Evaluate a contiguous index block of a basis at one point.
pub fn eval_basis_block(
    basis: &dyn Basis,
    start: usize,
    len: usize,
    x: &Point,
) -> Result<Vec<Complex64>> {
    let end = start + len;
    if let BasisDim::Finite(d) = basis.dim() {
        if end > d {
            return Err(Error::IndexOutOfRange {
                index: end - 1,
                dim: d,
            });
        }
    }
    let mut out = alloc::vec![Complex64::ZERO; len];
    basis.eval_block(start, x, &mut out);
    Ok(out)
}

/// Maximal Monte Carlo estimate of `|<b_j, b_k> - delta_jk|` over `j, k < m`,
/// verifying the orthonormality contract at a fixed budget. Deterministic
/// given the seed.
pub fn orthonormality_defect(
    basis: &dyn Basis,
    measure: &Measure,
    m: usize,
    mc_budget: usize,
    seed: u64,
) -> Result<f64> {
    if !basis.dim().contains(m.saturating_sub(1)) {
        return Err(Error::IndexOutOfRange {
            index: m - 1,
            dim: match basis.dim() {
                BasisDim::Finite(d) => d,
                BasisDim::Unbounded => usize::MAX,
            },
        });
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut acc = alloc::vec![Complex64::ZERO; m * m];
    let mut row = alloc::vec![Complex64::ZERO; m];
    for _ in 0..mc_budget {
        let x = measure.sample(&mut rng);
        basis.eval_block(0, &x, &mut row);
        for j in 0..m {
            for k in 0..m {
                acc[j * m + k] += row[j] * row[k].conj();
            }
        }
    }
    let scale = 1.0 / mc_budget as f64;
    let mut defect = 0.0f64;
    for j in 0..m {
        for k in 0..m {
            let est = acc[j * m + k] * scale;
            let target = if j == k { 1.0 } else { 0.0 };
            defect = defect.max((est - target).norm());
        }
    }
    Ok(defect)
}

/// Fourier exponentials on the circle, ordered by increasing `|frequency|`
/// with the positive frequency first: 0, 1, -1, 2, -2, ...
///
/// Orthonormal for the uniform measure on the circle (and on `[0, 1]`), with
/// `theta = 1`; the prefix density `(1/m) sum |b_k|^2` is identically one.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrigBasis;

impl TrigBasis {
    /// Frequency of the `k`-th element under the fixed ordering.
    pub fn frequency(k: usize) -> i64 {
        if k == 0 {
            0
        } else if k % 2 == 1 {
            k.div_ceil(2) as i64
        } else {
            -((k / 2) as i64)
        }
    }

    /// Inverse of [`TrigBasis::frequency`].
    pub fn index_of(freq: i64) -> usize {
        match freq {
            0 => 0,
            f if f > 0 => (2 * f - 1) as usize,
            f => (-2 * f) as usize,
        }
    }
}

impl Basis for TrigBasis {
    fn eval(&self, k: usize, x: &Point) -> Complex64 {
        let phase = 2.0 * core::f64::consts::PI * Self::frequency(k) as f64 * x.x();
        Complex64::new(phase.cos(), phase.sin())
    }

    fn dim(&self) -> BasisDim {
        BasisDim::Unbounded
    }

    fn theta(&self) -> Option<f64> {
        Some(1.0)
    }

    fn prefix_sup_sq(&self, m: usize) -> Option<f64> {
        Some(m as f64)
    }
}

/// Shifted Legendre polynomials on `[0, 1]`, L2-normalized:
/// `b_k(x) = sqrt(2k + 1) * P_k(2x - 1)`.
///
/// No uniform bound over all k; `|b_k|` peaks at the endpoints with value
/// `sqrt(2k + 1)`, so `sup sum_{k<m} |b_k|^2 = m^2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LegendreBasis;

impl Basis for LegendreBasis {
    fn eval(&self, k: usize, x: &Point) -> Complex64 {
        let t = 2.0 * x.x() - 1.0;
        let mut prev = 1.0f64;
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let mut cur = t;
        for j in 1..k {
            let next = ((2 * j + 1) as f64 * t * cur - j as f64 * prev) / (j + 1) as f64;
            prev = cur;
            cur = next;
        }
        Complex64::new(((2 * k + 1) as f64).sqrt() * cur, 0.0)
    }

    fn eval_block(&self, start: usize, x: &Point, out: &mut [Complex64]) {
        // One recurrence pass instead of out.len() restarts.
        let t = 2.0 * x.x() - 1.0;
        let (mut prev, mut cur) = (1.0f64, t);
        let push = |k: usize, v: f64, out: &mut [Complex64]| {
            if k >= start && k < start + out.len() {
                out[k - start] = Complex64::new(((2 * k + 1) as f64).sqrt() * v, 0.0);
            }
        };
        push(0, prev, out);
        push(1, cur, out);
        for j in 1..start + out.len() {
            let next = ((2 * j + 1) as f64 * t * cur - j as f64 * prev) / (j + 1) as f64;
            prev = cur;
            cur = next;
            push(j + 1, cur, out);
        }
    }

    fn dim(&self) -> BasisDim {
        BasisDim::Unbounded
    }

    fn prefix_sup_sq(&self, m: usize) -> Option<f64> {
        Some((m * m) as f64)
    }
}

/// The Haar system on `[0, 1]`: the constant, then for each level `j` the
/// `2^j` step wavelets of height `2^(j/2)`, left to right.
///
/// Unbounded sup norms, but bounded on average: at full levels the prefix
/// density is identically one.
#[derive(Clone, Copy, Debug, Default)]
pub struct HaarBasis;

impl HaarBasis {
    /// Level and translation of wavelet index `k >= 1`.
    fn split(k: usize) -> (u32, usize) {
        let j = usize::BITS - 1 - k.leading_zeros();
        (j, k - (1usize << j))
    }
}

impl Basis for HaarBasis {
    fn eval(&self, k: usize, x: &Point) -> Complex64 {
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let (j, l) = Self::split(k);
        let scale = (1usize << j) as f64;
        let t = x.x() * scale - l as f64;
        let v = if (0.0..0.5).contains(&t) {
            scale.sqrt()
        } else if (0.5..1.0).contains(&t) {
            -scale.sqrt()
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    }

    fn dim(&self) -> BasisDim {
        BasisDim::Unbounded
    }

    fn prefix_sup_sq(&self, m: usize) -> Option<f64> {
        if m == 0 {
            return Some(0.0);
        }
        // Full levels below m contribute exactly 2^J at every point; a
        // partial top level adds 2^J more on the covered part.
        let full = (m + 1).next_power_of_two() / 2; // largest 2^J <= m
        Some(if m == full {
            m as f64
        } else {
            (2 * full) as f64
        })
    }
}

/// A basis tabulated on a finite set: element `k` at point `g` is
/// `table[g][k]`. The natural domain is `FiniteSet { size }` with the
/// normalized counting measure; orthonormality of the columns under that
/// measure is the caller's contract and can be checked exactly with
/// [`orthonormality_defect`].
#[derive(Clone, Debug)]
pub struct TabulatedBasis {
    values: Vec<Complex64>,
    size: usize,
    dim: usize,
}

impl TabulatedBasis {
    /// `values[g * dim + k]` holds element `k` at grid point `g`.
    pub fn new(values: Vec<Complex64>, size: usize, dim: usize) -> Result<Self> {
        if size == 0 || dim == 0 || values.len() != size * dim {
            return Err(crate::error::invalid(
                "tabulated basis needs a full size-by-dim value table",
            ));
        }
        Ok(Self { values, size, dim })
    }

    pub fn grid_size(&self) -> usize {
        self.size
    }
}

impl Basis for TabulatedBasis {
    fn eval(&self, k: usize, x: &Point) -> Complex64 {
        let g = x.x() as usize;
        assert!(
            k < self.dim && g < self.size,
            "tabulated index out of range"
        );
        self.values[g * self.dim + k]
    }

    fn dim(&self) -> BasisDim {
        BasisDim::Finite(self.dim)
    }

    fn theta(&self) -> Option<f64> {
        Some(self.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max))
    }
}
