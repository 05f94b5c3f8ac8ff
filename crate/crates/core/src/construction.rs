//! Local farthest insertion: builds a connected graph `G` through `K`,
//! plus a virtual graph `H` of bookkeeping segments that guarantee nearby
//! structure for later insertions.
//!
//! Points are inserted in farthest-insertion order. For the new point
//! `x0` at level `k` (`2^{-k} ≤ d < 2^{-k+1}`), with `o` its nearest prior
//! point and `Q = Ball(x0, A 2^{-k})`, the flatness `β(Q)` and the two cones
//! at `o` pick one of five cases.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::beta::{beta_of, LineSearch};
use crate::error::{Error, Result};
use crate::geometry::{diameter_pair, dist, dot, offset, Ball, Line, Point, PointSet};
use crate::graph::{GeometricGraph, UnionFind};
use crate::nets::default_n0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub a: f64,
    pub eps0: f64,
    /// Coarsest level; defaults to the largest `n` with `2^{-n} ≥ diam(K)`.
    pub n0: Option<i32>,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        Self { a: 8.0, eps0: 0.1, n0: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionOrder {
    pub order: Vec<usize>,
    /// `d[i]`: distance from point `i` to the points inserted before it.
    pub d: Vec<f64>,
    /// Lowest-index nearest earlier point; `None` for the first point.
    pub nearest: Vec<Option<usize>>,
    pub level_of: Vec<i32>,
    pub n0: i32,
}

/// `p1, p2` realize the diameter (lowest indices on ties); every later
/// point maximizes the distance to those before it (lowest index on ties).
pub fn farthest_insertion_order(k: &PointSet) -> Result<InsertionOrder> {
    let n0 = default_n0(k, 1.0)?;
    farthest_insertion_order_from(k, n0)
}

fn farthest_insertion_order_from(k: &PointSet, n0: i32) -> Result<InsertionOrder> {
    let n = k.len();
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    let (p1, p2, diam) = diameter_pair(k).expect("at least two points");
    let mut d = vec![f64::INFINITY; n];
    let mut nearest = vec![None; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let relax = |p: usize, d: &mut [f64], nearest: &mut [Option<usize>], done: &[bool]| {
        for i in 0..n {
            if !done[i] {
                let e = dist(k.point(p), k.point(i));
                if e < d[i] || (e == d[i] && nearest[i].is_some_and(|q| p < q)) {
                    d[i] = e;
                    nearest[i] = Some(p);
                }
            }
        }
    };
    for (p, prev) in [(p1, None), (p2, Some(p1))] {
        done[p] = true;
        order.push(p);
        if let Some(q) = prev {
            d[p] = diam;
            nearest[p] = Some(q);
        }
        relax(p, &mut d, &mut nearest, &done);
    }
    d[p1] = diam;
    while order.len() < n {
        let mut pick = usize::MAX;
        for i in 0..n {
            if !done[i] && (pick == usize::MAX || d[i] > d[pick]) {
                pick = i;
            }
        }
        done[pick] = true;
        order.push(pick);
        relax(pick, &mut d, &mut nearest, &done);
    }
    let level_of = d.iter().map(|&di| level_for(di, n0)).collect();
    Ok(InsertionOrder { order, d, nearest, level_of, n0 })
}

/// The `k` with `2^{-k} ≤ d < 2^{-k+1}`, clamped below at `n0`.
fn level_for(d: f64, n0: i32) -> i32 {
    if d <= 0.0 {
        return i32::MAX;
    }
    let mut k = -(d.log2().floor() as i32);
    while f64::from(-k).exp2() > d {
        k += 1;
    }
    while f64::from(-k + 1).exp2() <= d {
        k -= 1;
    }
    k.max(n0)
}

/// Coordinates relative to the apex `origin` along the axis toward `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFrame {
    pub origin: Point,
    pub axis: Line,
    pub half_ball: Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    W,
    WStar,
    Both,
    Neither,
}

impl Cone {
    pub fn in_w(self) -> bool {
        matches!(self, Cone::W | Cone::Both)
    }

    pub fn in_w_star(self) -> bool {
        matches!(self, Cone::WStar | Cone::Both)
    }
}

impl ConeFrame {
    /// Frame at `origin` pointing at `x0`, with `½Q = Ball(x0, half_radius)`.
    pub fn new(origin: &[f64], x0: &[f64], half_radius: f64) -> Result<Self> {
        let axis = Line::through(origin, x0)?;
        let half_ball = Ball::new(Point::new(x0.to_vec())?, half_radius)?;
        Ok(Self { origin: Point::new(origin.to_vec())?, axis, half_ball })
    }

    /// Signed axial coordinate and distance to the axis.
    pub fn coords(&self, z: &[f64]) -> (f64, f64) {
        let o = self.origin.coords();
        let u = self.axis.direction.coords();
        let rel: Vec<f64> = z.iter().zip(o).map(|(a, b)| a - b).collect();
        let re = dot(&rel, u);
        let off = rel.iter().zip(u).map(|(r, w)| (r - re * w).powi(2)).sum::<f64>().sqrt();
        (re, off)
    }
}

/// `W`: `z ∈ ½Q` with `-Re z ≤ dist(z, axis)/√3`; `W*`: `Re z ≤ dist/√3`.
pub fn cone_membership(z: &[f64], frame: &ConeFrame) -> Result<Cone> {
    if z == frame.origin.coords() {
        return Err(Error::invalid("cone membership is undefined at the apex"));
    }
    if !frame.half_ball.contains(z) {
        return Ok(Cone::Neither);
    }
    let (re, off) = frame.coords(z);
    let bound = off / 3f64.sqrt();
    Ok(match (-re <= bound, re <= bound) {
        (true, true) => Cone::Both,
        (true, false) => Cone::W,
        (false, true) => Cone::WStar,
        (false, false) => Cone::Neither,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub case: u8,
    pub beta: f64,
    /// Prior points in both cones.
    pub dual_cone: usize,
}

/// One record per insertion; the JSON field names are the trace format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub case: u8,
    #[serde(rename = "dG")]
    pub d_g: f64,
    #[serde(rename = "dH")]
    pub d_h: f64,
    pub beta: f64,
    pub p1_repair: bool,
    pub dual_cone: usize,
}

/// Edges on a shared vertex pool, kept free of collinear overlaps so the
/// length of the union is the sum of the edge lengths.
#[derive(Debug, Clone, Default)]
struct Layer {
    edges: Vec<(usize, usize)>,
}

struct Collinear {
    t0: f64,
    v0: usize,
    t1: f64,
    v1: usize,
}

impl Layer {
    fn length(&self, pool: &PointSet) -> f64 {
        self.edges.iter().map(|&(u, v)| dist(pool.point(u), pool.point(v))).sum()
    }

    /// Parameters of edge `e` along `[a, b]` (unit speed) if it lies on the
    /// line through `a` and `b`.
    fn collinear(pool: &PointSet, a: usize, b: usize, e: (usize, usize), tol: f64) -> Option<Collinear> {
        let (pa, pb) = (pool.point(a), pool.point(b));
        let len = dist(pa, pb);
        let param = |p: &[f64]| -> Option<f64> {
            let t = p.iter().zip(pa).zip(pb).map(|((x, y), z)| (x - y) * (z - y)).sum::<f64>() / len;
            let off2: f64 = p.iter().zip(pa).zip(pb).map(|((x, y), z)| (x - y - t * (z - y) / len).powi(2)).sum();
            (off2.sqrt() <= tol).then_some(t)
        };
        let t0 = param(pool.point(e.0))?;
        let t1 = param(pool.point(e.1))?;
        Some(if t0 <= t1 {
            Collinear { t0, v0: e.0, t1, v1: e.1 }
        } else {
            Collinear { t0: t1, v0: e.1, t1: t0, v1: e.0 }
        })
    }

    /// Adds `[a, b]`, merging with overlapping collinear edges.
    fn add(&mut self, pool: &PointSet, a: usize, b: usize, tol: f64) {
        let len = dist(pool.point(a), pool.point(b));
        if a == b || len <= tol {
            return;
        }
        let mut breaks = vec![(0.0, a), (len, b)];
        let mut spans = vec![(0.0, len)];
        self.edges.retain(|&e| match Self::collinear(pool, a, b, e, tol) {
            Some(c) if c.t1.min(len) - c.t0.max(0.0) > tol => {
                breaks.push((c.t0, c.v0));
                breaks.push((c.t1, c.v1));
                spans.push((c.t0, c.t1));
                false
            }
            _ => true,
        });
        breaks.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut merged: Vec<(f64, usize)> = Vec::with_capacity(breaks.len());
        for bp in breaks {
            match merged.last_mut() {
                Some(last) if bp.0 - last.0 <= tol => last.1 = last.1.min(bp.1),
                _ => merged.push(bp),
            }
        }
        for w in merged.windows(2) {
            let mid = 0.5 * (w[0].0 + w[1].0);
            if spans.iter().any(|&(s, t)| s - tol <= mid && mid <= t + tol) && w[0].1 != w[1].1 {
                self.edges.push((w[0].1, w[1].1));
            }
        }
    }

    /// Whether `[a, b]` lies in the union of the layer's edges.
    fn covers(&self, pool: &PointSet, a: usize, b: usize, tol: f64) -> bool {
        let len = dist(pool.point(a), pool.point(b));
        let mut spans: Vec<(f64, f64)> = self
            .edges
            .iter()
            .filter_map(|&e| Self::collinear(pool, a, b, e, tol))
            .map(|c| (c.t0, c.t1))
            .collect();
        spans.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut reach = 0.0;
        for (s, t) in spans {
            if s > reach + tol {
                break;
            }
            reach = f64::max(reach, t);
        }
        reach >= len - tol
    }

    /// Deletes the part of the layer lying on `[a, b]`.
    fn remove(&mut self, pool: &PointSet, a: usize, b: usize, tol: f64) {
        let len = dist(pool.point(a), pool.point(b));
        let mut keep = Vec::new();
        self.edges.retain(|&e| match Self::collinear(pool, a, b, e, tol) {
            Some(c) if c.t1.min(len) - c.t0.max(0.0) > tol => {
                if -c.t0 > tol {
                    keep.push((c.v0, a));
                }
                if c.t1 - len > tol {
                    keep.push((b, c.v1));
                }
                false
            }
            _ => true,
        });
        self.edges.extend(keep);
    }
}

/// Construction state: `G` and `H` over a vertex pool whose first `|K|`
/// entries are `K` itself; virtual endpoints of `H` are appended.
#[derive(Debug, Clone)]
pub struct ConstructionState {
    params: ConstructionParams,
    n: usize,
    pool: PointSet,
    g: Layer,
    h: Layer,
    inserted: Vec<bool>,
    /// Duplicate points map to the earlier point they coincide with.
    twin: Vec<Option<usize>>,
    order: InsertionOrder,
    log: Vec<CaseRecord>,
    tol: f64,
    seed_g: f64,
    seed_h: f64,
}

impl ConstructionState {
    /// `G_2 = [p1, p2]` and `H_2 = [p1, p1 + A(p1 - p2)] ∪ [p2, p2 + A(p2 - p1)]`.
    pub fn new(k: &PointSet, params: ConstructionParams) -> Result<Self> {
        if !(params.a > 1.0 && params.a.is_finite()) {
            return Err(Error::invalid(format!("A must exceed 1, got {}", params.a)));
        }
        if !(params.eps0 >= 0.0 && params.eps0.is_finite()) {
            return Err(Error::invalid("eps0 must be finite and nonnegative"));
        }
        let n0 = match params.n0 {
            Some(n0) => n0,
            None => default_n0(k, 1.0)?,
        };
        let order = farthest_insertion_order_from(k, n0)?;
        let (p1, p2) = (order.order[0], order.order[1]);
        let diam = order.d[p2];
        if diam == 0.0 {
            return Err(Error::invalid("all points coincide"));
        }
        let n = k.len();
        let mut state = Self {
            params,
            n,
            pool: k.clone(),
            g: Layer::default(),
            h: Layer::default(),
            inserted: vec![false; n],
            twin: vec![None; n],
            order,
            log: Vec::new(),
            tol: 1e-10 * diam,
            seed_g: 0.0,
            seed_h: 0.0,
        };
        state.inserted[p1] = true;
        state.inserted[p2] = true;
        state.g.add(&state.pool, p1, p2, state.tol);
        let a = params.a;
        let (x1, x2) = (k.point(p1).to_vec(), k.point(p2).to_vec());
        let e1 = state.virtual_point(x1.iter().zip(&x2).map(|(s, t)| s + a * (s - t)).collect())?;
        let e2 = state.virtual_point(x2.iter().zip(&x1).map(|(s, t)| s + a * (s - t)).collect())?;
        state.h.add(&state.pool, p1, e1, state.tol);
        state.h.add(&state.pool, p2, e2, state.tol);
        state.seed_g = state.g.length(&state.pool);
        state.seed_h = state.h.length(&state.pool);
        Ok(state)
    }

    fn virtual_point(&mut self, p: Vec<f64>) -> Result<usize> {
        self.pool.push(&p)?;
        Ok(self.pool.len() - 1)
    }

    pub fn order(&self) -> &InsertionOrder {
        &self.order
    }

    pub fn case_log(&self) -> &[CaseRecord] {
        &self.log
    }

    fn prior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.inserted[i] && self.twin[i].is_none())
    }

    fn level_radius(&self, x0: usize) -> f64 {
        f64::from(-self.order.level_of[x0]).exp2()
    }

    fn frame(&self, x0: usize, o: usize) -> Result<ConeFrame> {
        let half = 0.5 * self.params.a * self.level_radius(x0);
        ConeFrame::new(self.pool.point(o), self.pool.point(x0), half)
    }

    /// Case of the next insertion of `x0`, which must not be inserted yet.
    pub fn classify(&self, x0: usize) -> Result<Classification> {
        let o = self.order.nearest[x0].ok_or_else(|| Error::invalid("point has no earlier neighbor"))?;
        let r = self.params.a * self.level_radius(x0);
        let q = Ball::new(Point::new(self.pool.point(x0).to_vec())?, r)?;
        let mut pts: Vec<&[f64]> = self.prior().map(|i| self.pool.point(i)).filter(|p| q.contains(p)).collect();
        pts.push(self.pool.point(x0));
        let beta = beta_of(&pts, &q, LineSearch::Auto).value;
        let frame = self.frame(x0, o)?;
        let (mut w, mut ws, mut dual) = (false, false, 0);
        for i in self.prior().filter(|&i| i != o) {
            let c = cone_membership(self.pool.point(i), &frame)?;
            w |= c.in_w();
            ws |= c.in_w_star();
            dual += usize::from(c == Cone::Both);
        }
        let case = if beta >= self.params.eps0 {
            1
        } else {
            match (w, ws) {
                (true, true) => 2,
                (true, false) => 3,
                (false, true) => 4,
                (false, false) => 5,
            }
        };
        Ok(Classification { case, beta, dual_cone: dual })
    }

    /// Inserts the next point of the order; `None` when all are in.
    pub fn step(&mut self) -> Result<Option<CaseRecord>> {
        let Some(&x0) = self.order.order.iter().find(|&&i| !self.inserted[i]) else {
            return Ok(None);
        };
        let o = self.order.nearest[x0].expect("later points have a neighbor");
        if self.order.d[x0] == 0.0 {
            self.inserted[x0] = true;
            self.twin[x0] = Some(o);
            let rec = CaseRecord { index: x0, case: 0, d_g: 0.0, d_h: 0.0, beta: 0.0, p1_repair: false, dual_cone: 0 };
            self.log.push(rec.clone());
            return Ok(Some(rec));
        }
        let cls = self.classify(x0)?;
        let (g0, h0) = (self.g.length(&self.pool), self.h.length(&self.pool));
        let p1_repair = match cls.case {
            1 => {
                self.case_one(x0, o)?;
                false
            }
            2 => self.swap(x0, o, self.nearest_in_w(x0, o)?)?,
            3 => self.case_three(x0, o)?,
            4 => {
                self.case_four(x0, o)?;
                false
            }
            _ => {
                self.case_five(x0, o)?;
                false
            }
        };
        self.inserted[x0] = true;
        self.check_connected(x0)?;
        let rec = CaseRecord {
            index: x0,
            case: cls.case,
            d_g: self.g.length(&self.pool) - g0,
            d_h: self.h.length(&self.pool) - h0,
            beta: cls.beta,
            p1_repair,
            dual_cone: cls.dual_cone,
        };
        self.log.push(rec.clone());
        Ok(Some(rec))
    }

    fn nearest_in_w(&self, x0: usize, o: usize) -> Result<usize> {
        let frame = self.frame(x0, o)?;
        let mut best: Option<(f64, usize)> = None;
        for i in self.prior().filter(|&i| i != o) {
            if cone_membership(self.pool.point(i), &frame)?.in_w() {
                let r = dist(self.pool.point(i), self.pool.point(o));
                if best.is_none_or(|b| r < b.0) {
                    best = Some((r, i));
                }
            }
        }
        best.map(|b| b.1).ok_or_else(|| Error::Invariant(format!("point {x0}: W is empty in a W case")))
    }

    /// Cheapest of a new edge to `o` or splitting a local `G` edge, then
    /// virtual segments at `x0` along the axis on each side whose cone at
    /// `x0` holds no earlier point.
    fn case_one(&mut self, x0: usize, o: usize) -> Result<()> {
        let d = self.order.d[x0];
        let p = self.pool.point(x0).to_vec();
        let reach = self.params.a * d;
        let mut best: (f64, Option<(usize, usize)>) = (d, None);
        for &(u, v) in &self.g.edges {
            let (pu, pv) = (self.pool.point(u), self.pool.point(v));
            if dist(pu, &p) <= reach && dist(pv, &p) <= reach {
                let cost = dist(pu, &p) + dist(&p, pv) - dist(pu, pv);
                if cost < best.0 {
                    best = (cost, Some((u, v)));
                }
            }
        }
        match best.1 {
            None => self.g.add(&self.pool, o, x0, self.tol),
            Some((u, v)) => {
                self.g.edges.retain(|&e| e != (u, v));
                self.g.add(&self.pool, u, x0, self.tol);
                self.g.add(&self.pool, x0, v, self.tol);
            }
        }
        let step = self.level_radius(x0);
        let frame = self.frame(x0, o)?;
        let at_x0 = ConeFrame { origin: Point::from_vec_unchecked(p.clone()), ..frame.clone() };
        let u = frame.axis.direction.coords().to_vec();
        let (mut ahead, mut behind) = (false, false);
        for i in self.prior() {
            let c = cone_membership(self.pool.point(i), &at_x0)?;
            ahead |= c.in_w();
            behind |= c.in_w_star();
        }
        for (occupied, sign) in [(ahead, 1.0), (behind, -1.0)] {
            if !occupied {
                let end = self.virtual_point(offset(&p, &u, sign * step))?;
                self.h.add(&self.pool, x0, end, self.tol);
            }
        }
        Ok(())
    }

    /// Replaces `[o, y1]` by `[o, x0], [x0, y1]`. Returns whether `[o, y1]`
    /// had to be added to `H` first.
    fn swap(&mut self, x0: usize, o: usize, y1: usize) -> Result<bool> {
        let tol = self.tol;
        if self.g.covers(&self.pool, o, y1, tol) {
            self.g.remove(&self.pool, o, y1, tol);
            self.g.add(&self.pool, o, x0, tol);
            self.g.add(&self.pool, x0, y1, tol);
            return Ok(false);
        }
        let repair = !self.h.covers(&self.pool, o, y1, tol);
        if repair {
            self.h.add(&self.pool, o, y1, tol);
        }
        self.h.remove(&self.pool, o, y1, tol);
        let first = dist(self.pool.point(o), self.pool.point(x0));
        let second = dist(self.pool.point(x0), self.pool.point(y1));
        let (short, long) = if first <= second { ((o, x0), (x0, y1)) } else { ((x0, y1), (o, x0)) };
        self.g.add(&self.pool, short.0, short.1, tol);
        self.h.add(&self.pool, long.0, long.1, tol);
        Ok(repair)
    }

    /// `G` edges through `members` in order of `(Re, index)`.
    fn chain(&mut self, frame: &ConeFrame, mut members: Vec<usize>) {
        let mut keyed: Vec<(f64, usize)> = members.drain(..).map(|i| (frame.coords(self.pool.point(i)).0, i)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for w in keyed.windows(2) {
            self.g.add(&self.pool, w[0].1, w[1].1, self.tol);
        }
    }

    /// `[z, z + len (z - o)/|z - o|]` into `H`, or `[o, o - len u]` when
    /// `z = o`.
    fn outward(&mut self, frame: &ConeFrame, o: usize, z: usize, len: f64) -> Result<()> {
        let (pz, po) = (self.pool.point(z).to_vec(), self.pool.point(o).to_vec());
        let r = dist(&pz, &po);
        let end: Vec<f64> = if r > self.tol {
            pz.iter().zip(&po).map(|(a, b)| a + len * (a - b) / r).collect()
        } else {
            offset(&po, frame.axis.direction.coords(), -len)
        };
        let e = self.virtual_point(end)?;
        self.h.add(&self.pool, z, e, self.tol);
        Ok(())
    }

    /// `[z, o + 2(z - o)]` into `H`.
    fn doubled(&mut self, o: usize, z: usize) -> Result<()> {
        if z == o {
            return Ok(());
        }
        let (pz, po) = (self.pool.point(z), self.pool.point(o));
        let end: Vec<f64> = pz.iter().zip(po).map(|(a, b)| b + 2.0 * (a - b)).collect();
        let e = self.virtual_point(end)?;
        self.h.add(&self.pool, z, e, self.tol);
        Ok(())
    }

    fn candidates(&self, x0: usize) -> Vec<usize> {
        self.prior().chain(std::iter::once(x0)).collect()
    }

    fn case_three(&mut self, x0: usize, o: usize) -> Result<bool> {
        let y1 = self.nearest_in_w(x0, o)?;
        let repair = self.swap(x0, o, y1)?;
        let frame = self.frame(x0, o)?;
        let po = self.pool.point(o).to_vec();
        let ry = dist(self.pool.point(y1), &po);
        let members: Vec<usize> =
            self.candidates(x0).into_iter().filter(|&i| dist(self.pool.point(i), &po) <= ry).collect();
        self.chain(&frame, members);

        let step = self.level_radius(x0);
        let mut z1 = (0.0, o);
        let mut far_w = 0.0f64;
        for i in self.candidates(x0).into_iter().filter(|&i| i != o) {
            let c = cone_membership(self.pool.point(i), &frame)?;
            let r = dist(self.pool.point(i), &po);
            if c.in_w_star() && r > z1.0 {
                z1 = (r, i);
            }
            if c.in_w() && i != x0 {
                far_w = far_w.max(r);
            }
        }
        self.outward(&frame, o, z1.1, step)?;
        if ry >= far_w {
            self.outward(&frame, o, y1, step)?;
        }
        Ok(repair)
    }

    fn case_four(&mut self, x0: usize, o: usize) -> Result<()> {
        let frame = self.frame(x0, o)?;
        let mut members = vec![o];
        for i in self.candidates(x0).into_iter().filter(|&i| i != o) {
            if cone_membership(self.pool.point(i), &frame)?.in_w() {
                members.push(i);
            }
        }
        let z_n = self.last_by_re(&frame, &members);
        self.chain(&frame, members);
        self.doubled(o, z_n)
    }

    fn case_five(&mut self, x0: usize, o: usize) -> Result<()> {
        let frame = self.frame(x0, o)?;
        let po = self.pool.point(o).to_vec();
        let r = 2.0 * self.level_radius(x0);
        let members: Vec<usize> =
            self.candidates(x0).into_iter().filter(|&i| dist(self.pool.point(i), &po) <= r).collect();
        let z_n = self.last_by_re(&frame, &members);
        let z_1 = self.first_by_re(&frame, &members);
        self.chain(&frame, members);
        self.doubled(o, z_n)?;
        self.outward(&frame, o, z_1, 0.5 * r)
    }

    fn last_by_re(&self, frame: &ConeFrame, members: &[usize]) -> usize {
        *members
            .iter()
            .max_by(|&&a, &&b| {
                let (ra, rb) = (frame.coords(self.pool.point(a)).0, frame.coords(self.pool.point(b)).0);
                ra.total_cmp(&rb).then(b.cmp(&a))
            })
            .expect("nonempty chain")
    }

    fn first_by_re(&self, frame: &ConeFrame, members: &[usize]) -> usize {
        *members
            .iter()
            .min_by(|&&a, &&b| {
                let (ra, rb) = (frame.coords(self.pool.point(a)).0, frame.coords(self.pool.point(b)).0);
                ra.total_cmp(&rb).then(a.cmp(&b))
            })
            .expect("nonempty chain")
    }

    fn check_connected(&self, x0: usize) -> Result<()> {
        let mut uf = UnionFind::new(self.pool.len());
        for &(u, v) in &self.g.edges {
            uf.union(u, v);
        }
        let root = uf.find(self.order.order[0]);
        for i in self.prior() {
            if uf.find(i) != root {
                return Err(Error::Invariant(format!("G disconnected after inserting {x0}: point {i} is cut off")));
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Construction {
        let mut g = GeometricGraph::new(self.pool.select(&(0..self.n).collect::<Vec<_>>()));
        for &(u, v) in &self.g.edges {
            g.add_edge(u, v).expect("G edges join distinct points of K");
        }
        for (i, t) in self.twin.iter().enumerate() {
            if let Some(t) = t {
                g.add_edge(i, *t).expect("duplicates have distinct indices");
            }
        }
        let mut h = GeometricGraph::new(self.pool.clone());
        for &(u, v) in &self.h.edges {
            h.add_edge(u, v).expect("H edges are nondegenerate");
        }
        let mut both = self.g.clone();
        for &(u, v) in &self.h.edges {
            both.add(&self.pool, u, v, self.tol);
        }
        let union_length = both.length(&self.pool);
        Construction {
            order: self.order,
            g,
            h,
            case_log: self.log,
            seed_g: self.seed_g,
            seed_h: self.seed_h,
            union_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub order: InsertionOrder,
    pub g: GeometricGraph,
    pub h: GeometricGraph,
    pub case_log: Vec<CaseRecord>,
    /// Lengths of `G_2` and `H_2`.
    pub seed_g: f64,
    pub seed_h: f64,
    /// `H¹(G ∪ H)`, overlaps between the layers counted once.
    pub union_length: f64,
}

impl Construction {
    pub fn g_length(&self) -> f64 {
        self.g.total_length()
    }

    pub fn h_length(&self) -> f64 {
        self.h.total_length()
    }

    /// Number of insertions per case; index 0 counts duplicates.
    pub fn case_counts(&self) -> [usize; 6] {
        let mut c = [0; 6];
        for r in &self.case_log {
            c[r.case as usize] += 1;
        }
        c
    }

    pub fn p1_repairs(&self) -> usize {
        self.case_log.iter().filter(|r| r.p1_repair).count()
    }

    /// The trace as JSON lines.
    pub fn write_trace<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.case_log {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn construct(k: &PointSet, params: ConstructionParams) -> Result<Construction> {
    let mut state = ConstructionState::new(k, params)?;
    while state.step()?.is_some() {}
    Ok(state.finish())
}
