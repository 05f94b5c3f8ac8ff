//! Arc betas and their square sums over parameter-dyadic filtrations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::COLLINEAR_TOL;
use crate::curve::{require_positive_length, PolylineCurve};
use crate::error::{Error, Result};
use crate::geometry::{dist, segment_dist};

/// Largest `depth * J` accepted; level `depth` then has `2^20` arcs.
pub const MAX_HALVINGS: u32 = 20;

/// The restriction of a curve to the arclength interval `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct Arc<'a> {
    pub parent: &'a PolylineCurve,
    pub a: f64,
    pub b: f64,
}

impl<'a> Arc<'a> {
    pub fn new(parent: &'a PolylineCurve, a: f64, b: f64) -> Result<Self> {
        let len = parent.length();
        if !(0.0 <= a && a < b && b <= len) {
            return Err(Error::invalid(format!("arc [{a}, {b}] outside [0, {len}]")));
        }
        Ok(Self { parent, a, b })
    }

    /// Vertices of the sub-curve; the curve is straight between them.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.parent.sub_curve(self.a, self.b, 1e-12 * self.parent.length())
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

fn diam_of(pts: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max(dist(p, q));
        }
    }
    best
}

/// `sup_t dist(τ(t), [τ(a), τ(b)]) / diam(τ)`, and 0 for point-like or
/// straight (to the collinearity tolerance) arcs. Distance to a segment is
/// convex, so on each straight piece the sup is at a piece endpoint and
/// only sub-curve vertices need checking.
pub fn beta_tilde(arc: &Arc<'_>) -> f64 {
    let pts = arc.vertices();
    beta_tilde_of(&pts, diam_of(&pts))
}

fn beta_tilde_of(pts: &[Vec<f64>], diam: f64) -> f64 {
    if diam <= 0.0 || pts.len() < 3 {
        return 0.0;
    }
    let (first, last) = (&pts[0], &pts[pts.len() - 1]);
    let sup = pts[1..pts.len() - 1].iter().map(|p| segment_dist(p, first, last)).fold(0.0, f64::max);
    if sup <= COLLINEAR_TOL * diam {
        return 0.0;
    }
    (sup / diam).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub n: u32,
    pub arc_index: usize,
    pub a: f64,
    pub b: f64,
    pub diam: f64,
    pub beta_tilde: f64,
    pub contribution: f64,
}

/// Level `n` cuts `[0, ℓ]` into `2^{nJ}` equal arclength intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicFiltration {
    pub length: f64,
    pub depth: u32,
    pub j: u32,
    pub levels: Vec<Vec<ArcRecord>>,
}

pub fn dyadic_filtration(c: &PolylineCurve, depth: u32, j: u32) -> Result<DyadicFiltration> {
    let len = require_positive_length(c)?;
    if j == 0 {
        return Err(Error::invalid("J must be at least 1"));
    }
    if depth.saturating_mul(j) > MAX_HALVINGS {
        return Err(Error::invalid(format!("depth * J = {} exceeds {MAX_HALVINGS}", depth * j)));
    }
    let snap = 1e-12 * len;
    let levels = (0..=depth)
        .map(|n| {
            let count = 1usize << (n * j);
            let step = len / count as f64;
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let a = i as f64 * step;
                    let b = if i + 1 == count { len } else { (i + 1) as f64 * step };
                    let pts = c.sub_curve(a, b, snap);
                    let diam = diam_of(&pts);
                    let beta = beta_tilde_of(&pts, diam);
                    ArcRecord { n, arc_index: i, a, b, diam, beta_tilde: beta, contribution: beta * beta * diam }
                })
                .collect()
        })
        .collect();
    Ok(DyadicFiltration { length: len, depth, j, levels })
}

impl DyadicFiltration {
    pub fn arcs(&self) -> impl Iterator<Item = &ArcRecord> + '_ {
        self.levels.iter().flatten()
    }

    /// For each level-1 arc: the sum over itself and all its descendants,
    /// and its length. Empty when `depth = 0`.
    pub fn ancestor_sums(&self) -> Vec<(f64, f64)> {
        let Some(first) = self.levels.get(1) else {
            return Vec::new();
        };
        let mut sums: Vec<(f64, f64)> = first.iter().map(|r| (0.0, r.b - r.a)).collect();
        for (n, level) in self.levels.iter().enumerate().skip(1) {
            let per_parent = 1usize << ((n as u32 - 1) * self.j);
            for r in level {
                sums[r.arc_index / per_parent].0 += r.contribution;
            }
        }
        sums
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in self.arcs() {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `Σ β̃(τ)² diam(τ)` over every arc of every level.
pub fn square_sum(f: &DyadicFiltration) -> f64 {
    f.arcs().map(|r| r.contribution).sum()
}
