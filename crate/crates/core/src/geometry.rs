//! Dimension-agnostic Euclidean primitives: points, point sets, balls, lines
//! and segment/ball clipping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^D with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { coords })
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// An ordered list of points sharing one ambient dimension, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be at least 1"));
        }
        Ok(Self { dim, coords: Vec::new() })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySet)?;
        let mut set = Self::new(first.as_ref().len())?;
        for row in rows {
            set.push(row.as_ref())?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        if let Some(i) = p.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_point(&self, i: usize) -> Point {
        Point::from_vec_unchecked(self.point(i).to_vec())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Applies `f` to every point. `f` must return points of dimension `dim`.
    pub fn map<F>(&self, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut out = Self::new(dim)?;
        for p in self.iter() {
            out.push(&f(p))?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// The subset with the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self { dim: self.dim, coords }
    }

    /// Smallest distance between two points with distinct indices, `None`
    /// for fewer than two points. Coincident points give 0.
    pub fn min_pairwise_gap(&self) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(self.point(i), self.point(j));
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }

    /// Smallest strictly positive pairwise distance.
    pub fn min_positive_gap(&self) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(self.point(i), self.point(j));
                if d > 0.0 {
                    best = Some(best.map_or(d, |b: f64| b.min(d)));
                }
            }
        }
        best
    }
}

/// Relative slack on every "distance at most r" decision, so that a rigid
/// motion's rounding cannot move a point across a ball or net boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

pub(crate) fn within(d: f64, r: f64) -> bool {
    d <= r * (1.0 + BOUNDARY_TOL)
}

/// A closed ball `{y : |y - center| <= radius}` of a multiresolution family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub level: i32,
    pub center_index: usize,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius, level: 0, center_index: usize::MAX })
    }

    pub fn with_level(mut self, level: i32, center_index: usize) -> Self {
        self.level = level;
        self.center_index = center_index;
        self
    }

    /// Diameter of the ball itself, `2 * radius`, regardless of what it
    /// contains.
    pub fn diam(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        within(dist(self.center.coords(), p), self.radius)
    }

    /// The ball with the same center and radius scaled by `factor`.
    pub fn dilate(&self, factor: f64) -> Self {
        Self { radius: self.radius * factor, ..self.clone() }
    }
}

/// An infinite line through `anchor` with unit `direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub anchor: Point,
    pub direction: Point,
}

impl Line {
    pub fn new(anchor: Point, direction: Vec<f64>) -> Result<Self> {
        if anchor.dim() != direction.len() {
            return Err(Error::DimensionMismatch { expected: anchor.dim(), got: direction.len() });
        }
        let n = norm(&direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("line direction must be a nonzero finite vector"));
        }
        let direction = direction.iter().map(|c| c / n).collect();
        Ok(Self { anchor, direction: Point::new(direction)? })
    }

    pub fn through(a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(Point::new(a.to_vec())?, sub(b, a))
    }

    /// Placeholder witness for sets whose beta is zero by convention.
    pub(crate) fn degenerate(anchor: &[f64]) -> Self {
        let mut direction = vec![0.0; anchor.len()];
        direction[0] = 1.0;
        Self {
            anchor: Point::from_vec_unchecked(anchor.to_vec()),
            direction: Point::from_vec_unchecked(direction),
        }
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Euclidean distance between two points of the same dimension.
pub fn distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    Ok(dist(p, q))
}

/// Largest pairwise distance, 0 for a singleton.
pub fn diameter(s: &PointSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(diameter_pair(s).map_or(0.0, |(_, _, d)| d))
}

/// The pair realizing the diameter, lowest `(i, j)` on ties.
pub fn diameter_pair(s: &PointSet) -> Option<(usize, usize, f64)> {
    let n = s.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(s.point(i), s.point(j));
            if best.is_none_or(|(_, _, b)| d > b) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

pub fn point_line_distance(p: &[f64], line: &Line) -> Result<f64> {
    check_dims(line.anchor.dim(), p.len())?;
    Ok(line_dist(p, line.anchor.coords(), line.direction.coords()))
}

/// Parameters `0 <= t0 <= t1 <= 1` such that `a + t (b - a)` lies in the
/// closed ball for exactly `t` in `[t0, t1]`, or `None` if the segment
/// misses the ball.
pub fn clip_segment(a: &[f64], b: &[f64], center: &[f64], radius: f64) -> Option<(f64, f64)> {
    let dim = a.len();
    let mut qa = 0.0;
    let mut qb = 0.0;
    let mut qc = 0.0;
    for k in 0..dim {
        let v = b[k] - a[k];
        let w = a[k] - center[k];
        qa += v * v;
        qb += v * w;
        qc += w * w;
    }
    let r2 = radius * radius;
    if qa == 0.0 {
        return (qc <= r2).then_some((0.0, 1.0));
    }
    // |w + t v|^2 = qa t^2 + 2 qb t + qc <= r^2
    let disc = qb * qb - qa * (qc - r2);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Stable root pair.
    let (mut lo, mut hi) = if qb >= 0.0 {
        let q = -(qb + sq);
        (q / qa, (qc - r2) / q)
    } else {
        let q = -qb + sq;
        ((qc - r2) / q, q / qa)
    };
    if !lo.is_finite() || !hi.is_finite() {
        // q == 0 only happens when qb == 0 and disc == 0: tangent at t = 0.
        lo = -qb / qa;
        hi = lo;
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let t0 = lo.max(0.0);
    let t1 = hi.min(1.0);
    (t0 <= t1).then_some((t0, t1))
}

// ---------------------------------------------------------------------------
// Small vector helpers shared across the crate.
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + t (b - a)`
#[inline]
pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// `p + s * dir`
#[inline]
pub(crate) fn offset(p: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    p.iter().zip(dir).map(|(x, d)| x + s * d).collect()
}

/// Distance from `p` to the line through `anchor` with unit direction `dir`.
#[inline]
pub(crate) fn line_dist(p: &[f64], anchor: &[f64], dir: &[f64]) -> f64 {
    // Norm of the residual rather than sqrt(|w|² - along²), which cancels
    // badly for points near the line.
    let along: f64 = p.iter().zip(anchor).zip(dir).map(|((x, a), d)| (x - a) * d).sum();
    p.iter()
        .zip(anchor)
        .zip(dir)
        .map(|((x, a), d)| {
            let r = x - a - along * d;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from `p` to the closed segment `[a, b]`.
pub(crate) fn segment_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let v = sub(b, a);
    let vv = dot(&v, &v);
    if vv == 0.0 {
        return dist(p, a);
    }
    let t = (dot(&sub(p, a), &v) / vv).clamp(0.0, 1.0);
    dist(p, &lerp(a, b, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(distance(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(close(distance(&[0.0; 3], &[1.0; 3]).unwrap(), 3f64.sqrt()));
        assert!(matches!(
            distance(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn diameter_examples() {
        let square = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(close(diameter(&square).unwrap(), 2f64.sqrt()));
        let single = PointSet::from_rows(&[[0.3, 0.2]]).unwrap();
        assert_eq!(diameter(&single).unwrap(), 0.0);
        assert!(matches!(diameter(&PointSet::new(2).unwrap()), Err(Error::EmptySet)));
    }

    #[test]
    fn point_line_distance_examples() {
        let x_axis = Line::new(Point::origin(2), vec![1.0, 0.0]).unwrap();
        assert_eq!(point_line_distance(&[0.0, 1.0], &x_axis).unwrap(), 1.0);
        assert_eq!(point_line_distance(&[5.0, 0.0], &x_axis).unwrap(), 0.0);
        let z_axis = Line::new(Point::origin(3), vec![0.0, 0.0, 2.0]).unwrap();
        assert!(close(point_line_distance(&[1.0, 1.0, 1.0], &z_axis).unwrap(), 2f64.sqrt()));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(Point::new(vec![0.0, f64::NAN]), Err(Error::NonFinite(1))));
        let mut s = PointSet::new(2).unwrap();
        assert!(s.push(&[f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn clip_segment_cases() {
        // Through the ball.
        let (t0, t1) = clip_segment(&[-2.0, 0.0], &[2.0, 0.0], &[0.0, 0.0], 1.0).unwrap();
        assert!(close(t0, 0.25) && close(t1, 0.75));
        // Fully inside.
        assert_eq!(clip_segment(&[-0.5, 0.0], &[0.5, 0.0], &[0.0, 0.0], 1.0), Some((0.0, 1.0)));
        // Misses.
        assert_eq!(clip_segment(&[-2.0, 2.0], &[2.0, 2.0], &[0.0, 0.0], 1.0), None);
        // Starts inside, exits.
        let (t0, t1) = clip_segment(&[0.0, 0.0], &[4.0, 0.0], &[0.0, 0.0], 1.0).unwrap();
        assert!(close(t0, 0.0) && close(t1, 0.25));
        // Degenerate segment.
        assert_eq!(clip_segment(&[0.1, 0.0], &[0.1, 0.0], &[0.0, 0.0], 1.0), Some((0.0, 1.0)));
    }

    #[test]
    fn segment_distance() {
        assert!(close(segment_dist(&[0.5, 1.0], &[0.0, 0.0], &[1.0, 0.0]), 1.0));
        assert!(close(segment_dist(&[2.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]), 1.0));
    }
}
