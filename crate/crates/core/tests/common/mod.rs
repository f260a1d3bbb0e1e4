//! Shared fixtures for the integration suites.

#![allow(dead_code)]

use optsample_core::model::Point;
use optsample_core::scattered::PiecewiseApproximant;
use optsample_core::{Complex64, Rng};
use rand::Rng as _;

/// Standard normal draw (Box-Muller).
pub fn gauss(rng: &mut Rng) -> f64 {
    let u: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Complex Gaussian vector normalized to the unit sphere.
pub fn unit_sphere_complex(dim: usize, rng: &mut Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gauss(rng), gauss(rng)))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= norm;
    }
    v
}

/// Mean and standard error of the mean.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Least-squares slope of log(y) against log(x), with the R^2 of the fit.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    (slope, r2)
}

/// Tail sum `sum_{k >= m} k^-2`, accurate to ~1e-12.
pub fn inverse_square_tail(m: usize) -> f64 {
    let cut = 1_000_000usize.max(m);
    let partial: f64 = (m..cut).map(|k| 1.0 / (k as f64 * k as f64)).sum();
    // Integral bracket for the remainder past the cutoff.
    partial + 1.0 / (cut as f64 - 0.5)
}

/// A univariate function whose second derivative oscillates with order-one
/// amplitude at every dyadic scale: a lacunary cosine sum with amplitude
/// `4^-j` at frequency `2^j`, periodized over the unit interval. The best
/// local quadratic approximation on an interval of length `L` errs like
/// `L^2` (the first frequency beyond `1/L` can never be captured), which is
/// the extremal behavior of a class with bounded second derivatives.
pub struct RoughCurvature {
    phases: Vec<f64>,
    top_level: u32,
}

impl RoughCurvature {
    pub fn new(seed: u64) -> Self {
        let top_level = 14u32;
        let mut rng = optsample_core::rng_from_seed(seed);
        let phases = (0..=top_level)
            .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
            .collect();
        Self { phases, top_level }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.phases
            .iter()
            .enumerate()
            .map(|(j, phase)| {
                let freq = (1u64 << j) as f64;
                0.25f64.powi(j as i32) * (std::f64::consts::TAU * freq * x + phase).cos()
            })
            .sum()
    }

    /// Squared L2 distance to a piecewise polynomial, by composite 3-point
    /// Gauss quadrature on a grid four times finer than the top frequency
    /// (quadrature error far below the amplitude of the finest component).
    pub fn l2_error_sq(&self, approx: &PiecewiseApproximant) -> f64 {
        let cells = 1usize << (self.top_level + 2);
        let h = 1.0 / cells as f64;
        let offset = (0.6f64).sqrt() / 2.0; // sqrt(3/5) / 2
        let nodes = [0.5 - offset, 0.5, 0.5 + offset];
        let weights = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
        let mut acc = 0.0;
        for j in 0..cells {
            let left = j as f64 * h;
            for (t, w) in nodes.iter().zip(&weights) {
                let x = left + t * h;
                let diff = self.eval(x) - approx.eval(&Point::d1(x));
                acc += w * diff * diff;
            }
        }
        acc * h
    }
}
