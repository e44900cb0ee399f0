//! Points in the unit square, fixed-radius neighbor queries and the exact
//! probability that two uniform points are adjacent.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};

use rand::Rng;

use crate::error::{Error, Result};

/// A point of the unit square `[0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!(
                "point ({x}, {y}) lies outside the unit square"
            )));
        }
        Ok(Self { x, y })
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Closed-ball adjacency: distance at most `r`.
    #[inline]
    pub fn within(&self, other: &Point, r: f64) -> bool {
        self.dist_sq(other) <= r * r
    }
}

/// Draws `n` independent uniform points from `rng`.
pub fn sample_positions<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Point> {
    (0..n)
        .map(|_| Point {
            x: rng.gen::<f64>(),
            y: rng.gen::<f64>(),
        })
        .collect()
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(0.0..=SQRT_2).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, sqrt 2]")));
    }
    Ok(())
}

/// Uniform grid over the unit square with cell side equal to the query
/// radius. A radius query only looks at the 3×3 block of cells around the
/// query point.
#[derive(Debug, Clone)]
pub struct GridIndex {
    points: Vec<Point>,
    radius: f64,
    cell_size: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl GridIndex {
    pub fn new(points: Vec<Point>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        // r >= 1 collapses to one bucket; r = 0 keeps a valid cell size and
        // is short-circuited at query time.
        let cell_size = if radius >= 1.0 || radius == 0.0 {
            1.0
        } else {
            radius
        };
        let mut index = Self {
            points,
            radius,
            cell_size,
            buckets: HashMap::new(),
        };
        for id in 0..index.points.len() {
            let cell = index.cell_of(&index.points[id]);
            index.buckets.entry(cell).or_default().push(id);
        }
        Ok(index)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cell_of(&self, p: &Point) -> (i64, i64) {
        if self.radius >= 1.0 {
            return (0, 0);
        }
        (
            (p.x / self.cell_size).floor() as i64,
            (p.y / self.cell_size).floor() as i64,
        )
    }

    pub fn bucket(&self, cell: (i64, i64)) -> &[usize] {
        self.buckets.get(&cell).map_or(&[], Vec::as_slice)
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Neighbors of vertex `v` at the index radius, appended to `out`.
    pub fn neighbors_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        let p = *self
            .points
            .get(v)
            .ok_or_else(|| Error::InvalidInput(format!("vertex {v} is not indexed")))?;
        if self.radius == 0.0 {
            return Ok(());
        }
        let r = self.radius;
        let (cx, cy) = self.cell_of(&p);
        let span = if self.radius >= 1.0 { 0 } else { 1 };
        for dx in -span..=span {
            for dy in -span..=span {
                for &u in self.bucket((cx + dx, cy + dy)) {
                    if u != v && p.within(&self.points[u], r) {
                        out.push(u);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Vertices `u != v` with `dist(u, v) <= r`. `r` may not exceed the radius
/// the index was built for.
pub fn radius_neighbors(index: &GridIndex, v: usize, r: f64) -> Result<Vec<usize>> {
    if r > index.radius || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "query radius {r} does not fit an index built for radius {}",
            index.radius
        )));
    }
    let mut out = Vec::new();
    index.neighbors_into(v, &mut out)?;
    if r < index.radius {
        let p = index.points[v];
        out.retain(|&u| p.within(&index.points[u], r));
    }
    Ok(out)
}

/// Probability that two independent uniform points of the unit square lie
/// within distance `r` of each other.
pub fn pair_adjacency_probability(r: f64) -> Result<f64> {
    check_radius(r)?;
    if r <= 1.0 {
        let r2 = r * r;
        return Ok(PI * r2 - 8.0 / 3.0 * r2 * r + 0.5 * r2 * r2);
    }
    Ok(pair_probability_quadrature(r).min(1.0))
}

/// For `1 < r <= sqrt 2`. The coordinate gaps |dx|, |dy| have density
/// `2(1 - t)` and CDF `G(t) = 2t - t²` on [0, 1], so
/// `P = ∫₀¹ 2(1 - x) G(min(1, sqrt(r² - x²))) dx`.
/// Up to `x0 = sqrt(r² - 1)` the inner CDF is 1; beyond it we substitute
/// `x = r sin θ`, which removes the square-root singularity at `x = r`.
fn pair_probability_quadrature(r: f64) -> f64 {
    let x0 = (r * r - 1.0).sqrt();
    let head = 2.0 * x0 - x0 * x0;
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let t = (r * c).min(1.0);
        2.0 * (1.0 - r * s) * (2.0 * t - t * t) * r * c
    };
    let lo = (x0 / r).asin();
    let hi = (1.0 / r).asin();
    head + adaptive_simpson(&integrand, lo, hi, 1e-13, 50)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords
            .iter()
            .map(|&(x, y)| Point::new(x, y).unwrap())
            .collect()
    }

    fn brute_neighbors(points: &[Point], v: usize, r: f64) -> Vec<usize> {
        (0..points.len())
            .filter(|&u| u != v && points[u].dist_sq(&points[v]) <= r * r)
            .collect()
    }

    #[test]
    fn point_rejects_outside_square() {
        assert!(Point::new(1.0, 0.0).is_ok());
        assert!(Point::new(1.0 + 1e-12, 0.0).is_err());
        assert!(Point::new(0.5, -0.1).is_err());
        assert!(Point::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn sampling_empty_and_deterministic() {
        assert!(sample_positions(0, &mut substream(1, &[])).is_empty());
        let a = sample_positions(1000, &mut substream(7, &[0]));
        let b = sample_positions(1000, &mut substream(7, &[0]));
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_is_uniform() {
        let n = 100_000;
        let ps = sample_positions(n, &mut substream(2024, &[0]));
        let mean = ps.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let below = ps.iter().filter(|p| p.x < 0.25).count() as f64 / n as f64;
        assert!((mean - 0.5).abs() <= 0.005, "mean {mean}");
        assert!((below - 0.25).abs() <= 0.01, "frac {below}");
        assert!(ps
            .iter()
            .all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
    }

    #[test]
    fn closed_ball_on_a_line() {
        let index = GridIndex::new(pts(&[(0.0, 0.0), (0.0, 0.5), (0.0, 1.0)]), 0.5).unwrap();
        assert_eq!(radius_neighbors(&index, 0, 0.5).unwrap(), vec![1]);
        let mut mid = radius_neighbors(&index, 1, 0.5).unwrap();
        mid.sort();
        assert_eq!(mid, vec![0, 2]);
    }

    #[test]
    fn isolated_vertex_and_bad_ids() {
        let index = GridIndex::new(pts(&[(0.1, 0.1), (0.9, 0.9)]), 0.2).unwrap();
        assert!(radius_neighbors(&index, 0, 0.2).unwrap().is_empty());
        assert!(matches!(
            radius_neighbors(&index, 5, 0.2),
            Err(Error::InvalidInput(_))
        ));
        assert!(radius_neighbors(&index, 0, 0.3).is_err());
    }

    #[test]
    fn zero_radius_has_no_neighbors() {
        let index = GridIndex::new(pts(&[(0.5, 0.5), (0.5, 0.5)]), 0.0).unwrap();
        assert!(radius_neighbors(&index, 0, 0.0).unwrap().is_empty());
    }

    #[test]
    fn large_radius_uses_one_bucket() {
        let ps = sample_positions(50, &mut substream(3, &[]));
        let index = GridIndex::new(ps, 1.2).unwrap();
        assert_eq!(index.bucket_count(), 1);
    }

    #[test]
    fn every_point_in_exactly_one_bucket() {
        let ps = sample_positions(400, &mut substream(11, &[]));
        let index = GridIndex::new(ps.clone(), 0.07).unwrap();
        let mut seen = vec![0usize; ps.len()];
        for (i, p) in ps.iter().enumerate() {
            let cell = index.cell_of(p);
            assert_eq!(cell.0, (p.x / 0.07).floor() as i64);
            assert!(index.bucket(cell).contains(&i));
        }
        for b in index.buckets.values() {
            for &i in b {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn grid_matches_all_pairs_scan() {
        for (trial, &r) in [0.01, 0.1, 0.5, 1.0, 1.4].iter().enumerate() {
            for &n in &[0usize, 1, 17, 500, 2000] {
                let ps = sample_positions(n, &mut substream(99, &[trial as u64, n as u64]));
                let index = GridIndex::new(ps.clone(), r).unwrap();
                for v in 0..n {
                    let mut got = radius_neighbors(&index, v, r).unwrap();
                    got.sort_unstable();
                    assert_eq!(got, brute_neighbors(&ps, v, r), "n={n} r={r} v={v}");
                }
            }
        }
    }

    #[test]
    fn pair_probability_special_values() {
        assert_eq!(pair_adjacency_probability(0.0).unwrap(), 0.0);
        assert!((pair_adjacency_probability(SQRT_2).unwrap() - 1.0).abs() <= 1e-10);
        assert!((pair_adjacency_probability(0.1).unwrap() - 0.0287993).abs() <= 1e-6);
        assert!(pair_adjacency_probability(-0.1).is_err());
        assert!(pair_adjacency_probability(1.5).is_err());
    }

    #[test]
    fn pair_probability_continuous_at_one() {
        let left = pair_adjacency_probability(1.0).unwrap();
        let right = pair_adjacency_probability(1.0 + 1e-12).unwrap();
        assert!((left - right).abs() <= 1e-8, "{left} vs {right}");
    }

    #[test]
    fn pair_probability_monotone() {
        let mut prev = 0.0;
        for i in 0..=1414 {
            let r = (i as f64 * 1e-3).min(SQRT_2);
            let p = pair_adjacency_probability(r).unwrap();
            assert!(p >= prev - 1e-15, "r={r}");
            prev = p;
        }
    }

    #[test]
    fn pair_probability_boundary_bounds() {
        for i in 0..=500 {
            let r = i as f64 * 1e-3;
            let p = pair_adjacency_probability(r).unwrap();
            let upper = PI * r * r;
            let lower = upper * (1.0 - 3.0 * r + 3.0 * r * r);
            assert!(lower <= p + 1e-15 && p <= upper + 1e-15, "r={r}");
        }
    }

    #[test]
    fn pair_probability_matches_simulation() {
        let mut rng = substream(5, &[]);
        let trials = 1_000_000u32;
        let r = 0.2;
        let hits = (0..trials)
            .filter(|_| {
                let a = Point {
                    x: rng.gen(),
                    y: rng.gen(),
                };
                let b = Point {
                    x: rng.gen(),
                    y: rng.gen(),
                };
                a.within(&b, r)
            })
            .count() as f64;
        let p = pair_adjacency_probability(r).unwrap();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits / trials as f64 - p).abs() <= 4.0 * se);
    }
}
