//! Jones beta numbers: the width of the thinnest slab around a line that
//! contains `K ∩ Q`, divided by `diam(Q) = 2 * radius`.
//!
//! The data inside the ball is first expressed in its own orthonormal frame
//! (pivoted Gram-Schmidt, so the frame is built from the data alone). When
//! the intrinsic dimension is at most two the thinnest slab is found
//! exactly: its direction is parallel to a convex hull edge. Otherwise a
//! small set of candidate axes is tried (diameter pair and top principal
//! direction), each with the optimal offset for that direction, which is the
//! center of the smallest ball enclosing the projections onto the
//! orthogonal complement.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;
use crate::enclosing::min_enclosing_ball;
use crate::error::{Error, Result};
use crate::geometry::{check_dims, dist, dot, norm, Ball, Line, Point, PointSet, BOUNDARY_TOL};

/// Relative rank threshold: residuals below `COLLINEAR_TOL * diam(Q)` are
/// treated as zero when building the intrinsic frame.
pub const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMethod {
    Exact2d,
    CandidateAxes,
    GridOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaValue {
    pub value: f64,
    pub witness_line: Line,
    pub method: BetaMethod,
}

/// Which line search to run on the intrinsic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineSearch {
    /// Exact in intrinsic dimension two or less, candidate axes otherwise.
    #[default]
    Auto,
    /// Always candidate axes, to measure the heuristic against the oracle.
    CandidateAxesOnly,
}

/// Beta of the point set restricted to the closed ball.
pub fn beta_points(s: &PointSet, q: &Ball) -> Result<BetaValue> {
    beta_points_with(s, q, LineSearch::Auto)
}

pub fn beta_points_with(s: &PointSet, q: &Ball, search: LineSearch) -> Result<BetaValue> {
    check_dims(q.center.dim(), s.dim())?;
    let inside: Vec<&[f64]> = s.iter().filter(|p| q.contains(p)).collect();
    Ok(beta_of(&inside, q, search))
}

/// Beta of the continuum `Γ ∩ Q`. Every segment is clipped exactly to the
/// ball; for a fixed line the distance is convex along a segment, so the
/// supremum over the curve is attained at a clipped endpoint.
pub fn beta_polyline(c: &PolylineCurve, q: &Ball) -> Result<BetaValue> {
    beta_polyline_with(c, q, LineSearch::Auto)
}

pub fn beta_polyline_with(c: &PolylineCurve, q: &Ball, search: LineSearch) -> Result<BetaValue> {
    check_dims(q.center.dim(), c.dim())?;
    let pts = c.clipped_endpoints(q);
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    Ok(beta_of(&refs, q, search))
}

/// Brute-force planar reference: `grid` slab directions evenly spaced in
/// `[0, π)`, each with the optimal offset. Always at least the true beta and
/// within `π / (2 grid)` of it.
pub fn beta_oracle_2d(s: &PointSet, q: &Ball, grid: usize) -> Result<BetaValue> {
    if s.dim() != 2 {
        return Err(Error::invalid(format!("grid oracle needs dimension 2, got {}", s.dim())));
    }
    check_dims(2, q.center.dim())?;
    let inside: Vec<&[f64]> = s.iter().filter(|p| q.contains(p)).collect();
    oracle_of(&inside, q, grid)
}

/// Grid oracle applied to the clipped endpoints of a planar polyline.
pub fn beta_polyline_oracle_2d(c: &PolylineCurve, q: &Ball, grid: usize) -> Result<BetaValue> {
    if c.dim() != 2 {
        return Err(Error::invalid(format!("grid oracle needs dimension 2, got {}", c.dim())));
    }
    check_dims(2, q.center.dim())?;
    let pts = c.clipped_endpoints(q);
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    oracle_of(&refs, q, grid)
}

pub(crate) fn oracle_of(pts: &[&[f64]], q: &Ball, grid: usize) -> Result<BetaValue> {
    if grid == 0 {
        return Err(Error::invalid("grid must be positive"));
    }
    let center = q.center.coords();
    if pts.len() <= 1 {
        return Ok(zero(pts.first().copied().unwrap_or(center), BetaMethod::GridOracle));
    }
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for j in 0..grid {
        let theta = std::f64::consts::PI * j as f64 / grid as f64;
        let (sin, cos) = theta.sin_cos();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            let proj = -sin * p[0] + cos * p[1];
            lo = lo.min(proj);
            hi = hi.max(proj);
        }
        if hi - lo < best.0 {
            best = (hi - lo, theta, 0.5 * (lo + hi));
        }
    }
    let (width, theta, mid) = best;
    let (sin, cos) = theta.sin_cos();
    let line = Line {
        anchor: Point::from_vec_unchecked(vec![-sin * mid, cos * mid]),
        direction: Point::from_vec_unchecked(vec![cos, sin]),
    };
    Ok(BetaValue { value: (width / q.diam()).min(1.0), witness_line: line, method: BetaMethod::GridOracle })
}

fn zero(anchor: &[f64], method: BetaMethod) -> BetaValue {
    BetaValue { value: 0.0, witness_line: Line::degenerate(anchor), method }
}

/// Beta of points already known to lie in `q`.
pub(crate) fn beta_of(pts: &[&[f64]], q: &Ball, search: LineSearch) -> BetaValue {
    let diam_q = q.diam();
    let method = match search {
        LineSearch::Auto => BetaMethod::Exact2d,
        LineSearch::CandidateAxesOnly => BetaMethod::CandidateAxes,
    };
    if pts.len() <= 1 {
        return zero(pts.first().copied().unwrap_or(q.center.coords()), method);
    }
    let frame = IntrinsicFrame::new(pts, COLLINEAR_TOL * diam_q);
    if frame.rank() <= 1 {
        let line = match frame.basis.first() {
            Some(dir) => Line {
                anchor: Point::from_vec_unchecked(frame.origin.clone()),
                direction: Point::from_vec_unchecked(dir.clone()),
            },
            None => Line::degenerate(&frame.origin),
        };
        return BetaValue { value: 0.0, witness_line: line, method };
    }
    let slab = if frame.rank() == 2 && search == LineSearch::Auto {
        thinnest_slab_2d(&frame.coords)
    } else {
        candidate_axes(&frame.coords)
    };
    let line = Line {
        anchor: Point::from_vec_unchecked(frame.lift_point(&slab.anchor)),
        direction: Point::from_vec_unchecked(frame.lift_vector(&slab.direction)),
    };
    let method = if frame.rank() == 2 && search == LineSearch::Auto {
        BetaMethod::Exact2d
    } else {
        BetaMethod::CandidateAxes
    };
    BetaValue { value: (slab.width / diam_q).min(1.0), witness_line: line, method }
}

/// An orthonormal frame for the affine hull of a point cloud, centered at
/// its centroid.
struct IntrinsicFrame {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
    coords: Vec<Vec<f64>>,
}

impl IntrinsicFrame {
    fn new(pts: &[&[f64]], tol: f64) -> Self {
        let dim = pts[0].len();
        let m = pts.len() as f64;
        let mut origin = vec![0.0; dim];
        for p in pts {
            for (o, x) in origin.iter_mut().zip(p.iter()) {
                *o += x;
            }
        }
        origin.iter_mut().for_each(|o| *o /= m);

        let mut residual: Vec<Vec<f64>> =
            pts.iter().map(|p| p.iter().zip(&origin).map(|(x, o)| x - o).collect()).collect();
        let mut norms: Vec<f64> = residual.iter().map(|r| norm(r)).collect();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while basis.len() < dim {
            // Largest residual first; lowest index on ties.
            let (pick, &len) = norms
                .iter()
                .enumerate()
                .fold((0, &norms[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
            if len <= tol {
                break;
            }
            let e: Vec<f64> = residual[pick].iter().map(|x| x / len).collect();
            for (r, n) in residual.iter_mut().zip(norms.iter_mut()) {
                let c = dot(r, &e);
                for (x, ek) in r.iter_mut().zip(&e) {
                    *x -= c * ek;
                }
                *n = norm(r);
            }
            // Re-orthogonalize against earlier vectors to hold orthonormality.
            let mut e = e;
            for b in &basis {
                let c = dot(&e, b);
                for (x, bk) in e.iter_mut().zip(b) {
                    *x -= c * bk;
                }
            }
            let ne = norm(&e);
            e.iter_mut().for_each(|x| *x /= ne);
            basis.push(e);
        }
        let coords = pts
            .iter()
            .map(|p| {
                let centered: Vec<f64> = p.iter().zip(&origin).map(|(x, o)| x - o).collect();
                basis.iter().map(|b| dot(&centered, b)).collect()
            })
            .collect();
        Self { origin, basis, coords }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn lift_vector(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.origin.len()];
        for (c, b) in v.iter().zip(&self.basis) {
            for (o, bk) in out.iter_mut().zip(b) {
                *o += c * bk;
            }
        }
        out
    }

    fn lift_point(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.lift_vector(v);
        for (o, x) in out.iter_mut().zip(&self.origin) {
            *o += x;
        }
        out
    }
}

/// A slab in intrinsic coordinates: full width, midline anchor and unit
/// direction.
struct Slab {
    width: f64,
    anchor: Vec<f64>,
    direction: Vec<f64>,
}

/// Minimum-width slab of planar points. The optimal slab has one boundary
/// line through a convex hull edge, so checking every hull edge is exact.
fn thinnest_slab_2d(pts: &[Vec<f64>]) -> Slab {
    let hull = convex_hull_2d(pts);
    let mut best: Option<Slab> = None;
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let (nx, ny) = (-uy, ux);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &hull {
            let s = (p[0] - a[0]) * nx + (p[1] - a[1]) * ny;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        let width = hi - lo;
        if best.as_ref().is_none_or(|b| width < b.width) {
            let mid = 0.5 * (lo + hi);
            best = Some(Slab { width, anchor: vec![a[0] + mid * nx, a[1] + mid * ny], direction: vec![ux, uy] });
        }
    }
    best.unwrap_or(Slab { width: 0.0, anchor: vec![0.0, 0.0], direction: vec![1.0, 0.0] })
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn convex_hull_2d(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut p: Vec<&Vec<f64>> = pts.iter().collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p.into_iter().cloned().collect();
    }
    let cross = |o: &[f64], a: &[f64], b: &[f64]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<&Vec<f64>> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Vec<f64>>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull.into_iter().cloned().collect()
}

/// Candidate directions: the diameter pair and the top principal axis.
/// For each, the offset is the center of the smallest ball enclosing the
/// projections onto the orthogonal complement.
fn candidate_axes(pts: &[Vec<f64>]) -> Slab {
    let mut directions = Vec::with_capacity(2);
    if let Some(d) = diameter_direction(pts) {
        directions.push(d);
    }
    if let Some(d) = principal_direction(pts) {
        directions.push(d);
    }
    let mut best: Option<Slab> = None;
    for u in directions {
        let proj: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let c = dot(p, &u);
                p.iter().zip(&u).map(|(x, uk)| x - c * uk).collect()
            })
            .collect();
        let ball = min_enclosing_ball(&proj);
        let width = 2.0 * ball.radius;
        if best.as_ref().is_none_or(|b| width < b.width) {
            best = Some(Slab { width, anchor: ball.center, direction: u });
        }
    }
    best.expect("at least the diameter direction exists for two or more distinct points")
}

fn diameter_direction(pts: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut best = (0, 0, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            // near-ties keep the first pair, whatever the rounding
            let d = dist(&pts[i], &pts[j]);
            if d > best.2 * (1.0 + BOUNDARY_TOL) {
                best = (i, j, d);
            }
        }
    }
    (best.2 > 0.0).then(|| pts[best.1].iter().zip(&pts[best.0]).map(|(b, a)| (b - a) / best.2).collect())
}

fn principal_direction(pts: &[Vec<f64>]) -> Option<Vec<f64>> {
    let r = pts[0].len();
    let mut cov = DMatrix::<f64>::zeros(r, r);
    for p in pts {
        for i in 0..r {
            for j in 0..r {
                cov[(i, j)] += p[i] * p[j];
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let top = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?.0;
    let v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let n = norm(&v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn ball(c: &[f64], r: f64) -> Ball {
        Ball::new(Point::new(c.to_vec()).unwrap(), r).unwrap()
    }

    #[test]
    fn collinear_points_have_zero_beta() {
        let s = PointSet::from_rows(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        let b = beta_points(&s, &ball(&[1.0, 1.0], 5.0)).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(crate::geometry::point_line_distance(&[2.0, 2.0], &b.witness_line).unwrap() < 1e-12);
    }

    #[test]
    fn thin_triangle_example() {
        let s = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.1]]).unwrap();
        let q = ball(&[0.5, 0.0], 1.0);
        let b = beta_points(&s, &q).unwrap();
        assert!((b.value - 0.05).abs() < 1e-12, "{}", b.value);
        assert_eq!(b.method, BetaMethod::Exact2d);
    }

    #[test]
    fn empty_and_singleton_intersections() {
        let s = PointSet::from_rows(&[[10.0, 0.0], [0.1, 0.0]]).unwrap();
        let q = ball(&[0.0, 0.0], 1.0);
        assert_eq!(beta_points(&s, &q).unwrap().value, 0.0);
        let far = ball(&[50.0, 50.0], 1.0);
        assert_eq!(beta_points(&s, &far).unwrap().value, 0.0);
    }

    #[test]
    fn equilateral_triangle_matches_oracle() {
        let h = 3f64.sqrt() / 2.0;
        let s = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        let q = ball(&[0.5, h / 3.0], 1.0);
        let oracle = beta_oracle_2d(&s, &q, 3600).unwrap();
        let expected = 3f64.sqrt() / 4.0;
        assert!((oracle.value - expected).abs() < 1e-9, "{}", oracle.value);
        assert!((beta_points(&s, &q).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn square_boundary_polyline() {
        let c = PolylineCurve::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let q = ball(&[0.5, 0.5], 1.0);
        let oracle = beta_polyline_oracle_2d(&c, &q, 3600).unwrap();
        assert!((oracle.value - 0.5).abs() < 1e-12);
        assert!((beta_polyline(&c, &q).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn l_shape_polyline_pinned_by_oracle() {
        // (0,0)-(1,0)-(1,1) inside Ball((1,0),1): the whole L is inside.
        // Thinnest slab is parallel to the hypotenuse (0,0)-(1,1) with
        // width sqrt(2)/2, so beta = (sqrt(2)/2)/2.
        let c = PolylineCurve::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let q = ball(&[1.0, 0.0], 1.0);
        let oracle = beta_polyline_oracle_2d(&c, &q, 3600).unwrap();
        let expected = 2f64.sqrt() / 4.0;
        assert!((oracle.value - expected).abs() < 1e-9, "{}", oracle.value);
        assert!((beta_polyline(&c, &q).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn straight_polyline_has_zero_beta() {
        let c = PolylineCurve::from_rows(&[[-3.0, -3.0], [0.0, 0.0], [3.0, 3.0]]).unwrap();
        assert_eq!(beta_polyline(&c, &ball(&[0.5, 0.2], 1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn oracle_rejects_non_planar_input() {
        let s = PointSet::from_rows(&[[0.0, 0.0, 0.0]]).unwrap();
        assert!(beta_oracle_2d(&s, &ball(&[0.0, 0.0, 0.0], 1.0), 10).is_err());
    }

    #[test]
    fn candidate_axes_in_three_dimensions() {
        // A thin box: 1 x 0.2 x 0.1. Its points lie in a slab of width
        // determined by the 0.2 x 0.1 cross-section.
        let mut rows = Vec::new();
        for i in 0..8 {
            rows.push([(i & 1) as f64, 0.2 * ((i >> 1) & 1) as f64, 0.1 * ((i >> 2) & 1) as f64]);
        }
        let s = PointSet::from_rows(&rows).unwrap();
        let q = ball(&[0.5, 0.1, 0.05], 1.0);
        let b = beta_points(&s, &q).unwrap();
        assert_eq!(b.method, BetaMethod::CandidateAxes);
        // The principal axis is the long edge direction; the cylinder
        // around it has radius equal to the half diagonal of the
        // cross-section, and beta = radius / 1.
        let along_axis = (0.1f64.powi(2) + 0.05f64.powi(2)).sqrt();
        assert!(b.value <= along_axis + 1e-12, "{}", b.value);
        assert!(b.value >= 0.05, "{}", b.value);
        for p in s.iter() {
            let d = crate::geometry::point_line_distance(p, &b.witness_line).unwrap();
            assert!(d <= b.value * q.diam() / 2.0 + 1e-12);
        }
    }

    #[test]
    fn candidate_axes_on_planar_data_is_within_factor_two() {
        let h = 3f64.sqrt() / 2.0;
        let s = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        let q = ball(&[0.5, h / 3.0], 1.0);
        let exact = beta_points(&s, &q).unwrap().value;
        let heur = beta_points_with(&s, &q, LineSearch::CandidateAxesOnly).unwrap().value;
        assert!(heur >= exact - 1e-12 && heur <= 2.0 * exact);
    }
}
