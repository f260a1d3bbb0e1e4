//! Domains, points and measures.

use crate::error::{invalid, Result};
use alloc::boxed::Box;
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;
use rand::{Rng as _, RngCore};

/// Maximal supported domain dimension. The cube-splitting recovery is only
/// practical for very low dimension, and all other domains are univariate.
pub const MAX_DIM: usize = 3;

/// A point of a domain: up to [`MAX_DIM`] real coordinates. Points of a
/// finite set are encoded as the index in coordinate zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&coords.len()),
            "point dimension must be 1..={MAX_DIM}"
        );
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Self {
            coords: c,
            dim: coords.len() as u8,
        }
    }

    /// Univariate point.
    pub fn d1(x: f64) -> Self {
        Self::new(&[x])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    /// First coordinate; the only one for univariate domains.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }
}

impl core::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

/// Fractional part in `[0, 1)`.
pub(crate) fn wrap_unit(v: f64) -> f64 {
    let r = v % 1.0;
    if r < 0.0 {
        r + 1.0
    } else {
        r
    }
}

/// Distance of two points of the 1-torus, `min_k |x + k - y|`.
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = wrap_unit(x - y);
    d.min(1.0 - d)
}

/// The supported domains with their metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `[0, 1]` with the usual distance.
    UnitInterval,
    /// `(0, 1)^d` with the Euclidean distance, `d <= MAX_DIM`.
    UnitCube { dim: usize },
    /// `[0, 1)` glued at the ends (1-torus); distances never exceed 1/2.
    Circle,
    /// `{0, 1, ..., size-1}` with the discrete metric.
    FiniteSet { size: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::UnitCube { dim } => *dim,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::UnitCube { dim } if !(1..=MAX_DIM).contains(dim) => Err(invalid(
                alloc::format!("cube dimension {dim} outside 1..={MAX_DIM}"),
            )),
            Domain::FiniteSet { size: 0 } => Err(invalid("finite set must be non-empty")),
            _ => Ok(()),
        }
    }

    /// Metric of the domain.
    pub fn dist(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Domain::UnitInterval => (x.x() - y.x()).abs(),
            Domain::Circle => circle_dist(x.x(), y.x()),
            Domain::UnitCube { dim } => (0..*dim)
                .map(|i| (x[i] - y[i]) * (x[i] - y[i]))
                .sum::<f64>()
                .sqrt(),
            Domain::FiniteSet { .. } => {
                if x.x() == y.x() {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Distance of `x` to the nearest point of `points`.
    pub fn dist_to_set(&self, x: &Point, points: &[Point]) -> f64 {
        points
            .iter()
            .map(|p| self.dist(x, p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::UnitInterval | Domain::Circle => (0.0..=1.0).contains(&x.x()),
            Domain::UnitCube { dim } => (0..*dim).all(|i| (0.0..=1.0).contains(&x[i])),
            Domain::FiniteSet { size } => {
                x.x() >= 0.0 && x.x() < *size as f64 && x.x().fract() == 0.0
            }
        }
    }

    /// Uniform draw with respect to the reference measure of the domain.
    pub fn sample_uniform(&self, rng: &mut dyn RngCore) -> Point {
        match self {
            Domain::UnitInterval | Domain::Circle => Point::d1(rng.gen::<f64>()),
            Domain::UnitCube { dim } => {
                let mut c = [0.0; MAX_DIM];
                for v in c.iter_mut().take(*dim) {
                    *v = rng.gen::<f64>();
                }
                Point {
                    coords: c,
                    dim: *dim as u8,
                }
            }
            Domain::FiniteSet { size } => Point::d1(rng.gen_range(0..*size) as f64),
        }
    }
}

type SamplerFn = Box<dyn Fn(&mut dyn RngCore) -> Point + Send + Sync>;
type DensityFn = Box<dyn Fn(&Point) -> f64 + Send + Sync>;

/// A measure on a domain, with a seeded sampler. The reference measure of a
/// domain (Lebesgue, or normalized counting on finite sets) is a probability
/// measure; other measures carry an evaluable density against that reference.
pub struct Measure {
    domain: Domain,
    sampler: Option<SamplerFn>,
    density_vs_base: Option<DensityFn>,
    total_mass: f64,
}

impl Measure {
    /// The uniform reference probability measure of the domain.
    pub fn uniform(domain: Domain) -> Self {
        Self {
            domain,
            sampler: None,
            density_vs_base: None,
            total_mass: 1.0,
        }
    }

    /// A measure given by a custom sampler and a density against the
    /// reference measure of the domain.
    pub fn with_density(
        domain: Domain,
        sampler: SamplerFn,
        density: DensityFn,
        total_mass: f64,
    ) -> Self {
        Self {
            domain,
            sampler: Some(sampler),
            density_vs_base: Some(density),
            total_mass,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - 1.0).abs() < 1e-12
    }

    /// Seeded random draw from the measure.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Point {
        match &self.sampler {
            Some(s) => s(rng),
            None => self.domain.sample_uniform(rng),
        }
    }

    /// Density against the reference measure, when the measure is not the
    /// reference itself.
    pub fn density_vs_base(&self, x: &Point) -> Option<f64> {
        self.density_vs_base.as_ref().map(|d| d(x))
    }
}

impl core::fmt::Debug for Measure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Measure")
            .field("domain", &self.domain)
            .field("total_mass", &self.total_mass)
            .field("custom_sampler", &self.sampler.is_some())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn torus_distance_is_capped() {
        assert_eq!(circle_dist(0.0, 0.5), 0.5);
        assert!((circle_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(0.25, 0.25), 0.0);
    }

    #[test]
    fn samples_lie_in_domain() {
        let mut rng = rng_from_seed(3);
        for domain in [
            Domain::UnitInterval,
            Domain::Circle,
            Domain::UnitCube { dim: 3 },
            Domain::FiniteSet { size: 5 },
        ] {
            for _ in 0..200 {
                let x = domain.sample_uniform(&mut rng);
                assert!(domain.contains(&x), "{domain:?} produced {x:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn torus_distance_symmetric(x in 0.0..1.0f64, y in 0.0..1.0f64) {
            let d = Domain::Circle;
            let (px, py) = (Point::d1(x), Point::d1(y));
            prop_assert!((d.dist(&px, &py) - d.dist(&py, &px)).abs() < 1e-15);
            prop_assert!(d.dist(&px, &py) <= 0.5 + 1e-15);
            prop_assert_eq!(d.dist(&px, &px), 0.0);
        }

        #[test]
        fn torus_triangle_inequality(x in 0.0..1.0f64, y in 0.0..1.0f64, z in 0.0..1.0f64) {
            let d = Domain::Circle;
            let (px, py, pz) = (Point::d1(x), Point::d1(y), Point::d1(z));
            prop_assert!(d.dist(&px, &pz) <= d.dist(&px, &py) + d.dist(&py, &pz) + 1e-12);
        }
    }

    #[test]
    fn density_measure_mc_average_matches_total_mass() {
        // Density 2x on [0, 1] via inverse-CDF sampling; the Monte Carlo
        // average of the density over reference draws recovers the mass.
        use rand::Rng as _;
        let measure = Measure::with_density(
            Domain::UnitInterval,
            alloc::boxed::Box::new(|rng: &mut dyn rand::RngCore| {
                let mut byte = [0u8; 8];
                rng.fill_bytes(&mut byte);
                let u = (u64::from_le_bytes(byte) >> 11) as f64 / (1u64 << 53) as f64;
                Point::d1(u.sqrt())
            }),
            alloc::boxed::Box::new(|x: &Point| 2.0 * x.x()),
            1.0,
        );
        let mut rng = rng_from_seed(77);
        let budget = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..budget {
            let x = Domain::UnitInterval.sample_uniform(&mut rng);
            let v = measure.density_vs_base(&x).unwrap();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / budget as f64;
        let se = ((sumsq / budget as f64 - mean * mean) / budget as f64).sqrt();
        assert!((mean - measure.total_mass()).abs() <= 3.0 * se);
        // Samples from the custom sampler land in the domain.
        for _ in 0..100 {
            assert!(Domain::UnitInterval.contains(&measure.sample(&mut rng)));
        }
        assert!(measure.is_probability());
        assert!(rng.gen::<f64>() >= 0.0);
    }
}
