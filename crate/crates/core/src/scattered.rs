//! Recovery from arbitrary points on the unit cube via adaptive cube
//! splitting and local polynomial least squares, plus point-set quality
//! metrics (covering radius and distortion).
//!
//! The splitting test is occupancy-based: a cube is split when every one of
//! its `2^d` subcubes has all of its `(2 ell)^d` cells occupied by a sample
//! point. Output cubes therefore carry two facts at once: enough well-spread
//! points for a stable local fit, and an empty cell of side `length/(4 ell)`
//! witnessing that the local resolution matches the local point density.
//!
//! Functions in this module are real-valued; the Sobolev-type classes the
//! method targets are classes of real functions.

use crate::error::{invalid, Result};
use crate::lipschitz::CircleDesign;
use crate::model::{Domain, Point, MAX_DIM};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // resolves float math in the no_std build
use num_traits::Float;

/// An axis-aligned dyadic subcube of the unit cube, identified by its level
/// (side `2^-level`) and its integer grid position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeId {
    pub level: u32,
    pub index: [u32; MAX_DIM],
}

impl CubeId {
    pub fn side(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn corner(&self, d: usize) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        let side = self.side();
        for (i, slot) in c.iter_mut().enumerate().take(d) {
            *slot = self.index[i] as f64 * side;
        }
        c
    }

    fn key(&self) -> u64 {
        // level <= 60 and indices < 2^20 in any realistic run.
        ((self.level as u64) << 60)
            | ((self.index[0] as u64) << 40)
            | ((self.index[1] as u64) << 20)
            | self.index[2] as u64
    }
}

/// A cover of the unit cube by dyadic cubes with pairwise disjoint
/// interiors, produced by the splitting pass, together with the sample
/// points assigned to each cube.
#[derive(Debug, Clone)]
pub struct CubeDecomposition {
    pub d: usize,
    pub ell: usize,
    cubes: Vec<CubeId>,
    members: Vec<Vec<usize>>,
    lookup: BTreeMap<u64, usize>,
    /// Number of cubes run through the split test; linear in the number of
    /// points.
    pub tested_cubes: usize,
}

impl CubeDecomposition {
    pub fn cubes(&self) -> &[CubeId] {
        &self.cubes
    }

    /// Indices (into the input point list) of the points inside cube `i`.
    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    /// The decomposition that failed at the root and was left as the single
    /// unit cube.
    pub fn is_root_only(&self) -> bool {
        self.cubes.len() == 1
    }

    /// Index of the cube containing `x`. Points on shared faces resolve to
    /// the cube with the lexicographically smallest corner.
    pub fn locate(&self, x: &Point) -> usize {
        let max_level = self.cubes.iter().map(|c| c.level).max().unwrap_or(0);
        for level in 0..=max_level {
            let id = cell_of(x, level, self.d);
            if let Some(&i) = self.lookup.get(&id.key()) {
                return i;
            }
        }
        unreachable!("decomposition covers the unit cube")
    }
}

/// Dyadic cell of `x` at `level`, with face ties broken toward the smaller
/// corner.
fn cell_of(x: &Point, level: u32, d: usize) -> CubeId {
    let cells = 1u64 << level;
    let scale = cells as f64;
    let mut index = [0u32; MAX_DIM];
    for i in 0..d {
        let mut idx = (x[i] * scale).floor() as i64;
        // A coordinate exactly on a grid line belongs to the cube on its
        // left, which is the lexicographically first containing cube.
        if idx as f64 == x[i] * scale && idx > 0 {
            idx -= 1;
        }
        index[i] = idx.clamp(0, cells as i64 - 1) as u32;
    }
    CubeId { level, index }
}

fn child_of(parent: &CubeId, child_bits: usize, d: usize) -> CubeId {
    let mut index = [0u32; MAX_DIM];
    for (i, slot) in index.iter_mut().enumerate().take(d) {
        *slot = 2 * parent.index[i] + ((child_bits >> i) & 1) as u32;
    }
    CubeId {
        level: parent.level + 1,
        index,
    }
}

/// Check that each of the `(2 ell)^d` cells of `cube` contains a point.
fn cells_all_occupied(
    cube: &CubeId,
    pts: &[Point],
    members: &[usize],
    ell: usize,
    d: usize,
) -> bool {
    let per_axis = 2 * ell;
    let cells: usize = (0..d).map(|_| per_axis).product();
    if members.len() < cells {
        return false;
    }
    let corner = cube.corner(d);
    let inv_cell = per_axis as f64 / cube.side();
    let mut seen = alloc::vec![false; cells];
    let mut remaining = cells;
    for &p in members {
        let mut cell = 0usize;
        for i in 0..d {
            let c = (((pts[p][i] - corner[i]) * inv_cell) as usize).min(per_axis - 1);
            cell = cell * per_axis + c;
        }
        if !seen[cell] {
            seen[cell] = true;
            remaining -= 1;
            if remaining == 0 {
                return true;
            }
        }
    }
    false
}

/// Split the unit cube over the sample points: a cube splits while all of
/// its `2^d` subcubes have every one of their `(2 ell)^d` cells occupied.
/// The single root cube is a legal output (badly distributed points).
pub fn cube_split(points: &[Point], ell: usize, d: usize) -> Result<CubeDecomposition> {
    if ell == 0 {
        return Err(invalid("cube splitting needs ell >= 1"));
    }
    if !(1..=MAX_DIM).contains(&d) {
        return Err(invalid(alloc::format!(
            "dimension {d} outside 1..={MAX_DIM}"
        )));
    }
    for p in points {
        if p.dim() != d || !(0..d).all(|i| p[i] > 0.0 && p[i] < 1.0) {
            return Err(invalid("points must lie in the open unit cube"));
        }
    }

    let root = CubeId {
        level: 0,
        index: [0; MAX_DIM],
    };
    let mut pool: Vec<(CubeId, Vec<usize>)> = alloc::vec![(root, (0..points.len()).collect())];
    let mut out_cubes = Vec::new();
    let mut out_members = Vec::new();
    let mut tested = 0usize;
    let children_count = 1usize << d;

    while let Some((cube, members)) = pool.pop() {
        tested += 1;
        // Partition the members over the 2^d subcubes.
        let mut parts: Vec<Vec<usize>> = (0..children_count).map(|_| Vec::new()).collect();
        let side = cube.side();
        let corner = cube.corner(d);
        for &p in &members {
            let mut bits = 0usize;
            for i in 0..d {
                if points[p][i] - corner[i] >= side / 2.0 {
                    bits |= 1 << i;
                }
            }
            parts[bits].push(p);
        }
        let splits = (0..children_count).all(|bits| {
            let child = child_of(&cube, bits, d);
            cells_all_occupied(&child, points, &parts[bits], ell, d)
        });
        if splits {
            for (bits, part) in parts.into_iter().enumerate() {
                pool.push((child_of(&cube, bits, d), part));
            }
        } else {
            out_cubes.push(cube);
            out_members.push(members);
        }
    }

    let lookup = out_cubes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.key(), i))
        .collect();
    Ok(CubeDecomposition {
        d,
        ell,
        cubes: out_cubes,
        members: out_members,
        lookup,
        tested_cubes: tested,
    })
}

/// Exponent tuples of total degree at most `s` in `d` variables.
fn monomials(s: usize, d: usize) -> Vec<[usize; MAX_DIM]> {
    let mut out = Vec::new();
    let mut exps = [0usize; MAX_DIM];
    loop {
        if (0..d).map(|i| exps[i]).sum::<usize>() <= s {
            out.push(exps);
        }
        // Odometer over {0..s}^d.
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            exps[i] += 1;
            if exps[i] > s {
                exps[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// A polynomial in scaled local coordinates of one cube.
#[derive(Debug, Clone)]
struct LocalPoly {
    exponents: Vec<[usize; MAX_DIM]>,
    coefficients: Vec<f64>,
}

impl LocalPoly {
    fn zero() -> Self {
        Self {
            exponents: alloc::vec![[0; MAX_DIM]],
            coefficients: alloc::vec![0.0],
        }
    }

    fn eval(&self, local: &[f64; MAX_DIM], d: usize) -> f64 {
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| {
                let mut term = *c;
                for i in 0..d {
                    term *= local[i].powi(e[i] as i32);
                }
                term
            })
            .sum()
    }
}

/// A piecewise polynomial over a cube decomposition, evaluable everywhere on
/// the unit cube.
#[derive(Debug, Clone)]
pub struct PiecewiseApproximant {
    decomposition: CubeDecomposition,
    pieces: Vec<LocalPoly>,
    /// Cubes whose local system was degenerate, with the degree actually
    /// used after falling back.
    pub degree_fallbacks: Vec<(usize, usize)>,
}

impl PiecewiseApproximant {
    pub fn decomposition(&self) -> &CubeDecomposition {
        &self.decomposition
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let i = self.decomposition.locate(x);
        let cube = &self.decomposition.cubes[i];
        let corner = cube.corner(self.decomposition.d);
        let side = cube.side();
        let mut local = [0.0; MAX_DIM];
        for j in 0..self.decomposition.d {
            local[j] = (x[j] - corner[j]) / side - 0.5;
        }
        self.pieces[i].eval(&local, self.decomposition.d)
    }
}

/// Pick `ell^d` well-spread node indices inside a cube: for each of its
/// `ell^d` cells, the member point closest to the cell center.
fn select_nodes(
    cube: &CubeId,
    points: &[Point],
    members: &[usize],
    ell: usize,
    d: usize,
) -> Vec<usize> {
    let cells: usize = (0..d).map(|_| ell).product();
    let corner = cube.corner(d);
    let side = cube.side();
    let cell_side = side / ell as f64;
    let mut best: Vec<Option<(f64, usize)>> = alloc::vec![None; cells];
    for &p in members {
        let mut cell = 0usize;
        let mut center = [0.0; MAX_DIM];
        for i in 0..d {
            let c = (((points[p][i] - corner[i]) / cell_side) as usize).min(ell - 1);
            cell = cell * ell + c;
            center[i] = corner[i] + (c as f64 + 0.5) * cell_side;
        }
        let dist2: f64 = (0..d)
            .map(|i| (points[p][i] - center[i]) * (points[p][i] - center[i]))
            .sum();
        if best[cell].is_none_or(|(b, _)| dist2 < b) {
            best[cell] = Some((dist2, p));
        }
    }
    best.into_iter().flatten().map(|(_, p)| p).collect()
}

/// Fit one cube by unweighted least squares of total degree at most `s` in
/// scaled local coordinates; degrade the degree when the local system is
/// rank deficient.
fn fit_cube(
    cube: &CubeId,
    points: &[Point],
    values: &[f64],
    nodes: &[usize],
    s: usize,
    d: usize,
) -> (LocalPoly, Option<usize>) {
    let corner = cube.corner(d);
    let side = cube.side();
    let locals: Vec<[f64; MAX_DIM]> = nodes
        .iter()
        .map(|&p| {
            let mut l = [0.0; MAX_DIM];
            for i in 0..d {
                l[i] = (points[p][i] - corner[i]) / side - 0.5;
            }
            l
        })
        .collect();
    let rhs = DVector::from_iterator(nodes.len(), nodes.iter().map(|&p| values[p]));

    for degree in (0..=s).rev() {
        let exponents = monomials(degree, d);
        if exponents.len() > nodes.len() {
            continue;
        }
        let mut mat = DMatrix::zeros(nodes.len(), exponents.len());
        for (row, l) in locals.iter().enumerate() {
            for (col, e) in exponents.iter().enumerate() {
                let mut v = 1.0;
                for i in 0..d {
                    v *= l[i].powi(e[i] as i32);
                }
                mat[(row, col)] = v;
            }
        }
        let svd = nalgebra::SVD::new(mat, true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smax <= 0.0 || smin / smax < 1e-10 {
            continue;
        }
        if let Ok(c) = svd.solve(&rhs, 0.0) {
            let poly = LocalPoly {
                exponents,
                coefficients: c.iter().copied().collect(),
            };
            let fallback = (degree < s).then_some(degree);
            return (poly, fallback);
        }
    }
    (LocalPoly::zero(), Some(0))
}

/// Piecewise polynomial recovery: split the cube over the points, then fit
/// each output cube by unweighted least squares of total degree at most `s`
/// on `ell^d` well-spread nodes. When the split fails at the root the
/// approximant is the zero function.
pub fn piecewise_recover(
    values: &[f64],
    points: &[Point],
    s: usize,
    ell: usize,
    d: usize,
) -> Result<PiecewiseApproximant> {
    if values.len() != points.len() {
        return Err(invalid("one value per point required"));
    }
    let decomposition = cube_split(points, ell, d)?;
    if decomposition.is_root_only() {
        let pieces = alloc::vec![LocalPoly::zero()];
        return Ok(PiecewiseApproximant {
            decomposition,
            pieces,
            degree_fallbacks: Vec::new(),
        });
    }
    let mut pieces = Vec::with_capacity(decomposition.cubes.len());
    let mut degree_fallbacks = Vec::new();
    for (i, cube) in decomposition.cubes.iter().enumerate() {
        let nodes = select_nodes(cube, points, &decomposition.members[i], ell, d);
        let (poly, fallback) = fit_cube(cube, points, values, &nodes, s, d);
        if let Some(deg) = fallback {
            degree_fallbacks.push((i, deg));
        }
        pieces.push(poly);
    }
    Ok(PiecewiseApproximant {
        decomposition,
        pieces,
        degree_fallbacks,
    })
}

/// Covering radius (fill distance) of a point set: the sup norm of the
/// distance function. Exact on the circle (half the largest gap), Monte
/// Carlo maximum elsewhere, hence a lower bound in general.
pub fn covering_radius(
    points: &[Point],
    domain: &Domain,
    mc_budget: usize,
    seed: u64,
) -> Result<f64> {
    if points.is_empty() {
        return Err(invalid("covering radius needs at least one point"));
    }
    if *domain == Domain::Circle {
        let design = CircleDesign::new(points.iter().map(|p| p.x()).collect())?;
        return Ok(design.gaps().iter().cloned().fold(0.0, f64::max) / 2.0);
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..mc_budget {
        let x = domain.sample_uniform(&mut rng);
        worst = worst.max(domain.dist_to_set(&x, points));
    }
    Ok(worst)
}

/// Distortion of a point set: the `L_gamma` norm of the distance function.
/// Exact on the circle (per-gap closed form), Monte Carlo elsewhere;
/// `gamma = inf` delegates to the covering radius.
pub fn distortion(
    points: &[Point],
    gamma: f64,
    domain: &Domain,
    mc_budget: usize,
    seed: u64,
) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid("distortion needs gamma > 0"));
    }
    if gamma.is_infinite() {
        return covering_radius(points, domain, mc_budget, seed);
    }
    if points.is_empty() {
        return Err(invalid("distortion needs at least one point"));
    }
    if *domain == Domain::Circle {
        let design = CircleDesign::new(points.iter().map(|p| p.x()).collect())?;
        let sum: f64 = design
            .gaps()
            .iter()
            .map(|g| 2.0 * (g / 2.0).powf(gamma + 1.0) / (gamma + 1.0))
            .sum();
        return Ok(sum.powf(1.0 / gamma));
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut acc = 0.0f64;
    for _ in 0..mc_budget {
        let x = domain.sample_uniform(&mut rng);
        acc += domain.dist_to_set(&x, points).powf(gamma);
    }
    Ok((acc / mc_budget as f64).powf(1.0 / gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    fn uniform_points(n: usize, d: usize, seed: u64) -> Vec<Point> {
        let mut rng = crate::rng_from_seed(seed);
        (0..n)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                Point::new(&c)
            })
            .collect()
    }

    #[test]
    fn hand_traced_univariate_split() {
        // Midpoints of the eight dyadic cells of width 1/8: the root splits
        // once (each half has all four of its cells occupied), the children
        // do not (their cells of width 1/16 contain the points only on one
        // side), leaving two cubes of side 1/2.
        let points: Vec<Point> = (0..8)
            .map(|k| Point::d1(k as f64 / 8.0 + 1.0 / 16.0))
            .collect();
        let dec = cube_split(&points, 2, 1).unwrap();
        assert_eq!(dec.cubes().len(), 2);
        for cube in dec.cubes() {
            assert_eq!(cube.level, 1);
        }
    }

    #[test]
    fn missing_corner_leaves_the_root() {
        // No point in the first cell of the root's left half.
        let points: Vec<Point> = (1..8)
            .map(|k| Point::d1(k as f64 / 8.0 + 1.0 / 16.0))
            .collect();
        let dec = cube_split(&points, 2, 1).unwrap();
        assert!(dec.is_root_only());
    }

    fn check_invariants(dec: &CubeDecomposition, points: &[Point]) {
        let d = dec.d;
        let ell = dec.ell;
        // Coverage: total volume one.
        let vol: f64 = dec.cubes().iter().map(|c| c.side().powi(d as i32)).sum();
        assert_abs_diff_eq!(vol, 1.0, epsilon = 1e-12);
        // Pairwise disjoint interiors: no cube's (strictly) containing
        // another's interior means no key is an ancestor of another.
        for a in dec.cubes() {
            for b in dec.cubes() {
                if a == b {
                    continue;
                }
                if a.level <= b.level {
                    let shift = b.level - a.level;
                    let is_ancestor = (0..d).all(|i| (b.index[i] >> shift) == a.index[i]);
                    assert!(!is_ancestor, "{a:?} contains {b:?}");
                }
            }
        }
        if dec.is_root_only() {
            // Root failed: an empty cell of side 1/(4 ell) must exist.
            assert!(has_empty_cell(&dec.cubes()[0], points, ell, d));
            return;
        }
        for (i, cube) in dec.cubes().iter().enumerate() {
            // Occupancy: every (2 ell)^d cell of the cube holds a point.
            assert!(
                cells_all_occupied(cube, points, dec.members(i), ell, d),
                "occupancy failed on {cube:?}"
            );
            // An empty cell of side length/(4 ell) witnesses why the cube
            // was not split further.
            assert!(
                has_empty_cell(cube, points, ell, d),
                "no witness on {cube:?}"
            );
        }
    }

    fn has_empty_cell(cube: &CubeId, points: &[Point], ell: usize, d: usize) -> bool {
        // Search the (4 ell)^d aligned grid of candidate cells.
        let per_axis = 4 * ell;
        let cells: usize = (0..d).map(|_| per_axis).product();
        let corner = cube.corner(d);
        let inv_cell = per_axis as f64 / cube.side();
        let mut seen = alloc::vec![false; cells];
        for p in points {
            let inside = (0..d).all(|i| p[i] >= corner[i] && p[i] < corner[i] + cube.side());
            if !inside {
                continue;
            }
            let mut cell = 0usize;
            for i in 0..d {
                let c = (((p[i] - corner[i]) * inv_cell) as usize).min(per_axis - 1);
                cell = cell * per_axis + c;
            }
            seen[cell] = true;
        }
        seen.iter().any(|s| !s)
    }

    #[test]
    fn decomposition_invariants_on_random_points() {
        for d in [1usize, 2] {
            for seed in 0..4 {
                let points = uniform_points(600, d, 100 + seed);
                let dec = cube_split(&points, 2, d).unwrap();
                check_invariants(&dec, &points);
                assert!(dec.tested_cubes <= 8 * points.len().max(1));
            }
        }
    }

    #[test]
    fn polynomials_are_reproduced() {
        // A global polynomial of total degree <= s is recovered exactly on
        // every cube.
        let d = 2;
        let s = 2;
        let f = |p: &Point| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1] - p[0] * p[0];
        let points = uniform_points(3000, d, 7);
        let values: Vec<f64> = points.iter().map(&f).collect();
        let approx = piecewise_recover(&values, &points, s, s + 1, d).unwrap();
        assert!(!approx.decomposition().is_root_only());
        let mut rng = crate::rng_from_seed(8);
        for _ in 0..500 {
            let x = Point::new(&[rng.gen::<f64>(), rng.gen::<f64>()]);
            assert_abs_diff_eq!(approx.eval(&x), f(&x), epsilon = 1e-8);
        }
    }

    #[test]
    fn local_fits_are_near_best_on_every_cube() {
        // The per-cube error is within a frozen factor of (near-)best
        // uniform approximation by the same polynomial class, estimated by
        // dense least squares on the cube. Calibrated worst ratio: 4.6 for
        // (s, d) = (2, 1); frozen with headroom.
        const LOCAL_FIT_FACTOR: f64 = 8.0;
        let (s, d) = (2usize, 1usize);
        let f = |x: f64| (7.3 * x).sin() + 0.3 * (23.0 * x + 1.0).cos();
        let points = uniform_points(900, d, 41);
        let values: Vec<f64> = points.iter().map(|p| f(p.x())).collect();
        let approx = piecewise_recover(&values, &points, s, s + 1, d).unwrap();
        let dec = approx.decomposition();
        assert!(!dec.is_root_only());
        for cube in dec.cubes() {
            let corner = cube.corner(d)[0];
            let side = cube.side();
            let grid = 96;
            let xs: Vec<f64> = (0..grid)
                .map(|i| corner + (i as f64 + 0.5) / grid as f64 * side)
                .collect();
            let fit_err = xs
                .iter()
                .map(|x| (f(*x) - approx.eval(&Point::d1(*x))).abs())
                .fold(0.0f64, f64::max);
            // Near-best candidate: dense least squares on the same grid.
            let mut mat = DMatrix::zeros(grid, s + 1);
            for (r, x) in xs.iter().enumerate() {
                let local = (x - corner) / side - 0.5;
                for c in 0..=s {
                    mat[(r, c)] = local.powi(c as i32);
                }
            }
            let rhs = DVector::from_iterator(grid, xs.iter().map(|x| f(*x)));
            let coef = nalgebra::SVD::new(mat.clone(), true, true)
                .solve(&rhs, 0.0)
                .unwrap();
            let best = (&mat * &coef - &rhs)
                .iter()
                .map(|v| v.abs())
                .fold(0.0f64, f64::max);
            if best > 1e-12 {
                assert!(
                    fit_err <= LOCAL_FIT_FACTOR * best,
                    "{cube:?}: {fit_err} vs best {best}"
                );
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_approximant() {
        let points = uniform_points(400, 1, 3);
        let approx = piecewise_recover(&alloc::vec![0.0; 400], &points, 2, 3, 1).unwrap();
        for i in 0..100 {
            assert_eq!(approx.eval(&Point::d1((i as f64 + 0.5) / 100.0)), 0.0);
        }
    }

    #[test]
    fn equispaced_circle_covering_radius_is_exact() {
        for n in [1usize, 2, 10, 64] {
            let points: Vec<Point> = (0..n).map(|i| Point::d1(i as f64 / n as f64)).collect();
            let r = covering_radius(&points, &Domain::Circle, 0, 0).unwrap();
            assert_abs_diff_eq!(r, 0.5 / n as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn circle_distortion_closed_form() {
        // n equispaced points, gamma = 1: n gaps of 1/n each contributing
        // 2 (1/(2n))^2 / 2, total 1/(4n).
        for n in [2usize, 8, 32] {
            let points: Vec<Point> = (0..n).map(|i| Point::d1(i as f64 / n as f64)).collect();
            let v = distortion(&points, 1.0, &Domain::Circle, 0, 0).unwrap();
            assert_abs_diff_eq!(v, 1.0 / (4 * n) as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn infinite_gamma_delegates_to_covering_radius() {
        let points = uniform_points(20, 1, 5)
            .into_iter()
            .map(|p| Point::d1(p.x()))
            .collect::<Vec<_>>();
        let a = distortion(&points, f64::INFINITY, &Domain::Circle, 0, 0).unwrap();
        let b = covering_radius(&points, &Domain::Circle, 0, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cube_covering_radius_is_a_lower_bound_increasing_in_budget() {
        let points = uniform_points(50, 2, 9);
        let domain = Domain::UnitCube { dim: 2 };
        let small = covering_radius(&points, &domain, 200, 1).unwrap();
        let large = covering_radius(&points, &domain, 20_000, 1).unwrap();
        assert!(large >= small, "MC max must grow with a nested budget");
    }

    #[test]
    fn distortion_grows_slower_than_covering_radius_for_random_points() {
        // i.i.d. circle points: the mean gap is 1/n but the largest gap is
        // of order log(n)/n, so the ratio sup/mean grows with n.
        let ratio = |n: usize| {
            let trials = 200;
            let mut acc = 0.0;
            for t in 0..trials {
                let points: Vec<Point> = uniform_points(n, 1, 1000 + t);
                let d1 = distortion(&points, 1.0, &Domain::Circle, 0, 0).unwrap();
                let dinf = covering_radius(&points, &Domain::Circle, 0, 0).unwrap();
                acc += dinf / d1;
            }
            acc / trials as f64
        };
        assert!(ratio(256) > ratio(16), "sup/mean gap ratio must grow");
    }
}
