//! Exact closed forms for recovery of 1-Lipschitz functions on the circle:
//! the radius of information of a point set, the optimal error over all
//! point sets, the expected radius under i.i.d. uniform points, and the
//! instance-optimal (central) reconstruction.
//!
//! These quantities are exact, so they serve as ground truth for the Monte
//! Carlo error estimators and the rate experiments elsewhere in the crate.

use crate::error::{invalid, Result};
use crate::model::{circle_dist, Point};
use alloc::vec::Vec;
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// Points on the circle `[0, 1)`, sorted, with their induced gap lengths.
#[derive(Debug, Clone)]
pub struct CircleDesign {
    points: Vec<f64>,
    gaps: Vec<f64>,
}

impl CircleDesign {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("circle design needs at least one point"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(invalid("circle design points must be finite"));
        }
        for x in points.iter_mut() {
            *x = crate::model::wrap_unit(*x);
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let n = points.len();
        let mut gaps: Vec<f64> = (1..n).map(|i| points[i] - points[i - 1]).collect();
        gaps.push(points[0] + 1.0 - points[n - 1]);
        // Wrap-around arithmetic leaves the gap sum within rounding of one;
        // renormalize so downstream closed forms stay exact.
        let sum: f64 = gaps.iter().sum();
        debug_assert!((sum - 1.0).abs() < 1e-12);
        for g in gaps.iter_mut() {
            *g /= sum;
        }
        Ok(Self { points, gaps })
    }

    pub fn equispaced(n: usize) -> Self {
        Self::new((0..n).map(|i| i as f64 / n as f64).collect()).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn dist_to(&self, x: f64) -> f64 {
        self.points
            .iter()
            .map(|p| circle_dist(x, *p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Radius of information of the design for the Lipschitz class in `L_p`:
/// the `L_p` norm of the distance function to the point set. Exact.
///
/// For `p = inf` this is half the largest gap; for finite `p` each gap `g`
/// contributes `2 (g/2)^(p+1) / (p+1)` to the `p`-th power.
pub fn exact_radius(design: &CircleDesign, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(design.gaps.iter().cloned().fold(0.0, f64::max) / 2.0);
    }
    let sum: f64 = design
        .gaps
        .iter()
        .map(|g| 2.0 * (g / 2.0).powf(p + 1.0) / (p + 1.0))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// Minimal worst-case error over all `n`-point designs (attained by
/// equispaced points): `(1/2) (1/(1+p))^(1/p) / n` for finite `p` and
/// `1/(2n)` for `p = inf`.
pub fn optimal_error(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    if n == 0 {
        return Err(invalid("optimal_error needs n >= 1"));
    }
    let n = n as f64;
    if p.is_infinite() {
        Ok(0.5 / n)
    } else {
        Ok(0.5 * (1.0 / (1.0 + p)).powf(1.0 / p) / n)
    }
}

/// Exact expectation for `n` i.i.d. uniform points: the `p`-th root of the
/// `p`-th moment of the radius for finite `p`, and the expected radius
/// itself for `p = inf`.
///
/// Finite `p`: `(1/2) (n! / ((p+1)...(p+n)))^(1/p)`, evaluated in log space.
/// `p = inf`: `(1/(2n)) H_n` with the harmonic number `H_n`.
pub fn expected_radius(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    if n == 0 {
        return Err(invalid("expected_radius needs n >= 1"));
    }
    if p.is_infinite() {
        let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
        return Ok(harmonic / (2.0 * n as f64));
    }
    let log_ratio: f64 = (1..=n).map(|i| (i as f64).ln() - (p + i as f64).ln()).sum();
    Ok(0.5 * (log_ratio / p).exp())
}

/// Result of the central (instance-optimal) reconstruction: the midpoint of
/// the largest and smallest Lipschitz interpolants of the data.
pub struct CentralReconstruction {
    design: CircleDesign,
    values: Vec<f64>,
    /// False when the data violates `|y_i - y_j| <= dist(x_i, x_j)`, i.e. is
    /// not consistent with any 1-Lipschitz function. Evaluation still works.
    pub lipschitz_consistent: bool,
}

impl CentralReconstruction {
    /// Largest interpolant `h+(x) = min_i (y_i + dist(x, x_i))`.
    pub fn upper(&self, x: f64) -> f64 {
        self.design
            .points
            .iter()
            .zip(&self.values)
            .map(|(p, y)| y + circle_dist(x, *p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest interpolant `h-(x) = max_i (y_i - dist(x, x_i))`.
    pub fn lower(&self, x: f64) -> f64 {
        self.design
            .points
            .iter()
            .zip(&self.values)
            .map(|(p, y)| y - circle_dist(x, *p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The reconstruction `(h+ + h-) / 2`.
    pub fn eval(&self, x: f64) -> f64 {
        0.5 * (self.upper(x) + self.lower(x))
    }
}

/// Central reconstruction from values at a circle design. Data inconsistent
/// with the Lipschitz class is flagged, not rejected.
pub fn central_reconstruct(design: &CircleDesign, values: &[f64]) -> Result<CentralReconstruction> {
    if values.len() != design.len() {
        return Err(invalid("one value per design point required"));
    }
    let mut consistent = true;
    'outer: for i in 0..design.len() {
        for j in (i + 1)..design.len() {
            let d = circle_dist(design.points[i], design.points[j]);
            if (values[i] - values[j]).abs() > d + 1e-12 {
                consistent = false;
                break 'outer;
            }
        }
    }
    Ok(CentralReconstruction {
        design: design.clone(),
        values: values.to_vec(),
        lipschitz_consistent: consistent,
    })
}

/// Distance to the design as a target function on the circle; the data-zero
/// worst case ("fooling function") of the Lipschitz class.
pub fn distance_function(design: &CircleDesign) -> impl Fn(&Point) -> f64 + '_ {
    move |x: &Point| design.dist_to(x.x())
}

fn check_p(p: f64) -> Result<()> {
    if p.is_infinite() || p >= 1.0 {
        Ok(())
    } else {
        Err(invalid("p must lie in [1, inf]"))
    }
}
