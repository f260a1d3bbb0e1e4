//! Domains, measures, bases, designs and target functions.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; samplers take the RNG state as an explicit argument.

mod basis;
mod domain;
mod target;

pub use basis::{
    eval_basis_block, orthonormality_defect, Basis, BasisDim, HaarBasis, LegendreBasis,
    TabulatedBasis, TrigBasis,
};
pub(crate) use domain::wrap_unit;
pub use domain::{circle_dist, Domain, Measure, Point, MAX_DIM};
pub use target::{Expansion, TargetFunction};

use crate::error::{invalid, Result};
use alloc::vec::Vec;

/// A finite multiset of domain points with positive weights.
///
/// This is the object every design construction produces and every recovery
/// routine consumes. The weighted point measure induces the pseudo inner
/// product `<f, g> = sum_i w_i f(x_i) conj(g(x_i))` on functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDesign {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl SampledDesign {
    /// Build a design from points and matching positive weights.
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("design must contain at least one point"));
        }
        if points.len() != weights.len() {
            return Err(invalid(alloc::format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(invalid("weights must be positive and finite"));
        }
        Ok(Self { points, weights })
    }

    /// Equal-weight design with weights `1/n`.
    pub fn equal_weights(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        Self::new(points, alloc::vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    /// Weighted seminorm `(sum_i w_i |v_i|^2)^(1/2)` of values aligned with
    /// the design points.
    pub fn discrete_norm(&self, values: &[crate::Complex64]) -> f64 {
        #[allow(unused_imports)] // resolves float math in the no_std build
        use num_traits::Float;
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}
