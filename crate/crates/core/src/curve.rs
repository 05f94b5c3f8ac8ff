//! Polyline curves with an arclength table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clip_segment, dist, lerp, Ball, PointSet};

/// An ordered vertex sequence read as the curve through consecutive
/// vertices, parametrized by arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineCurve {
    vertices: PointSet,
    cumulative: Vec<f64>,
}

impl PolylineCurve {
    pub fn new(vertices: PointSet) -> Self {
        let mut cumulative = Vec::with_capacity(vertices.len());
        let mut acc = 0.0;
        for i in 0..vertices.len() {
            if i > 0 {
                acc += dist(vertices.point(i - 1), vertices.point(i));
            }
            cumulative.push(acc);
        }
        Self { vertices, cumulative }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Ok(Self::new(PointSet::from_rows(rows)?))
    }

    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Arclength at each vertex.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn segments(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        (1..self.vertices.len()).map(move |i| (self.vertices.point(i - 1), self.vertices.point(i)))
    }

    /// The point at arclength `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        let n = self.vertices.len();
        if n == 0 {
            return Vec::new();
        }
        let total = self.length();
        if n == 1 || s <= 0.0 {
            return self.vertices.point(0).to_vec();
        }
        if s >= total {
            return self.vertices.point(n - 1).to_vec();
        }
        let seg = self.segment_at(s);
        let (s0, s1) = (self.cumulative[seg], self.cumulative[seg + 1]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        lerp(self.vertices.point(seg), self.vertices.point(seg + 1), t)
    }

    /// Index of the segment containing arclength `s` (the earlier one at a
    /// shared vertex).
    fn segment_at(&self, s: f64) -> usize {
        let idx = self.cumulative.partition_point(|&c| c < s);
        idx.saturating_sub(1).min(self.segment_count().saturating_sub(1))
    }

    /// Vertices of the sub-curve over arclength `[a, b]`: the interpolated
    /// endpoints plus every interior vertex. Endpoints within `snap` of a
    /// vertex arclength are snapped onto that vertex.
    pub fn sub_curve(&self, a: f64, b: f64, snap: f64) -> Vec<Vec<f64>> {
        let snap_to = |s: f64| -> (f64, Option<usize>) {
            let idx = self.cumulative.partition_point(|&c| c < s);
            for j in [idx.saturating_sub(1), idx] {
                if j < self.cumulative.len() && (self.cumulative[j] - s).abs() <= snap {
                    return (self.cumulative[j], Some(j));
                }
            }
            (s, None)
        };
        let (a, va) = snap_to(a);
        let (b, vb) = snap_to(b);
        let mut out = Vec::new();
        out.push(match va {
            Some(j) => self.vertices.point(j).to_vec(),
            None => self.point_at(a),
        });
        for (j, &c) in self.cumulative.iter().enumerate() {
            if c > a && c < b && Some(j) != va && Some(j) != vb {
                out.push(self.vertices.point(j).to_vec());
            }
        }
        if b > a {
            out.push(match vb {
                Some(j) => self.vertices.point(j).to_vec(),
                None => self.point_at(b),
            });
        }
        out
    }

    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// The same curve with its first vertex appended, if not already closed.
    pub fn closed(&self) -> Self {
        let n = self.vertices.len();
        if n < 2 || self.vertices.point(0) == self.vertices.point(n - 1) {
            return self.clone();
        }
        let mut v = self.vertices.clone();
        let first = v.point(0).to_vec();
        v.push(&first).expect("same dimension");
        Self::new(v)
    }

    /// Endpoints of every non-empty piece `segment ∩ ball`, two per
    /// segment (equal for a tangent or single-vertex intersection).
    pub fn clipped_endpoints(&self, ball: &Ball) -> Vec<Vec<f64>> {
        let c = ball.center.coords();
        let mut pts = Vec::new();
        if self.vertices.len() == 1 {
            let p = self.vertices.point(0);
            if ball.contains(p) {
                pts.push(p.to_vec());
            }
            return pts;
        }
        for (a, b) in self.segments() {
            if let Some((t0, t1)) = clip_segment(a, b, c, ball.radius) {
                pts.push(if t0 == 0.0 { a.to_vec() } else { lerp(a, b, t0) });
                pts.push(if t1 == 1.0 { b.to_vec() } else { lerp(a, b, t1) });
            }
        }
        pts
    }

    /// Largest distance from `p` to the curve, attained at a vertex.
    pub fn max_distance_from(&self, p: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dist(v, p)).fold(0.0, f64::max)
    }
}

/// Total arclength.
pub fn curve_length(c: &PolylineCurve) -> f64 {
    c.length()
}

/// Length of `C ∩ Q`, exact up to rounding: each segment is clipped to the
/// ball by solving the quadratic in the segment parameter.
pub fn clip_length(c: &PolylineCurve, q: &Ball) -> f64 {
    let center = q.center.coords();
    c.segments()
        .map(|(a, b)| match clip_segment(a, b, center, q.radius) {
            Some((t0, t1)) => (t1 - t0) * dist(a, b),
            None => 0.0,
        })
        .sum()
}

pub(crate) fn require_positive_length(c: &PolylineCurve) -> Result<f64> {
    let len = c.length();
    if len > 0.0 {
        Ok(len)
    } else {
        Err(Error::invalid("curve has zero length"))
    }
}
