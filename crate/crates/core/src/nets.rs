//! Nested `2^{-n}`-nets and the multiresolution ball family built on them.
//!
//! Level `n` uses the scale `eps_n = scale * 2^{-n}` (`scale = 1` unless a
//! caller needs scale covariance under non-dyadic dilations). A net at level
//! `n` is a subset of the base points that is `eps_n`-separated (pairwise
//! distances strictly greater than `eps_n`) and `eps_n`-covering (every base
//! point within `eps_n` of a member). Levels are nested: each level starts
//! from the previous level's members and greedily adds the remaining points
//! in scan order, which yields a maximal separated set and therefore a net.

use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;
use crate::error::{Error, Result};
use crate::geometry::{diameter, dist, within, Ball, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOrder {
    /// Original index order.
    #[default]
    Index,
    /// Reversed index order; used to compare two valid net choices.
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedNets {
    base: PointSet,
    scale: f64,
    n0: i32,
    n_max: i32,
    /// `levels[i]` is the sorted member list of level `n0 + i`.
    levels: Vec<Vec<usize>>,
}

impl NestedNets {
    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn n0(&self) -> i32 {
        self.n0
    }

    pub fn n_max(&self) -> i32 {
        self.n_max
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Net scale `scale * 2^{-n}`.
    pub fn epsilon(&self, n: i32) -> f64 {
        self.scale * (-(n as f64)).exp2()
    }

    pub fn level(&self, n: i32) -> Option<&[usize]> {
        if n < self.n0 || n > self.n_max {
            return None;
        }
        Some(&self.levels[(n - self.n0) as usize])
    }

    pub fn levels(&self) -> impl Iterator<Item = (i32, &[usize])> + '_ {
        self.levels.iter().enumerate().map(move |(i, m)| (self.n0 + i as i32, m.as_slice()))
    }

    /// Checks separation, covering and nesting with exact comparisons.
    pub fn check_invariants(&self) -> Result<()> {
        let mut prev: Option<&[usize]> = None;
        for (n, members) in self.levels() {
            let eps = self.epsilon(n);
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let d = dist(self.base.point(i), self.base.point(j));
                    if within(d, eps) {
                        return Err(Error::Invariant(format!(
                            "level {n}: members {i} and {j} at distance {d} <= {eps}"
                        )));
                    }
                }
            }
            for (p, x) in self.base.iter().enumerate() {
                if !members.iter().any(|&m| within(dist(x, self.base.point(m)), eps)) {
                    return Err(Error::Invariant(format!("level {n}: point {p} is not covered")));
                }
            }
            if let Some(prev) = prev {
                if let Some(missing) = prev.iter().find(|i| members.binary_search(i).is_err()) {
                    return Err(Error::Invariant(format!("level {n}: lost member {missing} of level {}", n - 1)));
                }
            }
            prev = Some(members);
        }
        Ok(())
    }
}

/// Nested nets for levels `n0..=n_max` at unit scale in index order.
pub fn build_nested_nets(k: &PointSet, n0: i32, n_max: i32) -> Result<NestedNets> {
    build_nested_nets_with(k, n0, n_max, 1.0, ScanOrder::Index)
}

pub fn build_nested_nets_with(
    k: &PointSet,
    n0: i32,
    n_max: i32,
    scale: f64,
    order: ScanOrder,
) -> Result<NestedNets> {
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    if n0 > n_max {
        return Err(Error::invalid(format!("n0 = {n0} exceeds n_max = {n_max}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid("net scale must be positive"));
    }
    let scan: Vec<usize> = match order {
        ScanOrder::Index => (0..k.len()).collect(),
        ScanOrder::Reverse => (0..k.len()).rev().collect(),
    };
    let mut levels = Vec::with_capacity((n_max - n0 + 1) as usize);
    let mut members: Vec<usize> = Vec::new();
    let mut is_member = vec![false; k.len()];
    for n in n0..=n_max {
        let eps = scale * (-(n as f64)).exp2();
        for &p in &scan {
            if is_member[p] {
                continue;
            }
            let x = k.point(p);
            if !members.iter().any(|&m| within(dist(x, k.point(m)), eps)) {
                members.push(p);
                is_member[p] = true;
            }
        }
        let mut sorted = members.clone();
        sorted.sort_unstable();
        levels.push(sorted);
    }
    Ok(NestedNets { base: k.clone(), scale, n0, n_max, levels })
}

/// Coarsest level with `scale * 2^{-n0} >= diam(K)`.
pub fn default_n0(k: &PointSet, scale: f64) -> Result<i32> {
    let d = diameter(k)?;
    if d == 0.0 {
        return Ok(0);
    }
    let n0 = (-(d / scale).log2()).floor() as i32;
    // Guard against log2 rounding on exact powers of two.
    Ok(if scale * (-(n0 as f64)).exp2() >= d { n0 } else { n0 - 1 })
}

/// Finest useful level for a finite set: below it every ball of radius
/// `A * eps_n` holds at most one point, so deeper levels add nothing to a
/// square sum over the points themselves.
pub fn auto_n_max(k: &PointSet, a: f64, scale: f64, n0: i32) -> i32 {
    match k.min_positive_gap() {
        None => n0,
        Some(gap) => {
            let mut n = ((a * scale / gap).log2().ceil() as i32 + 1).max(n0);
            while a * scale * (-(n as f64)).exp2() >= gap {
                n += 1;
            }
            n
        }
    }
}

/// How to pick levels when building a family from a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub n0: Option<i32>,
    pub n_max: Option<i32>,
    pub scale: f64,
    pub order: ScanOrder,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self { n0: None, n_max: None, scale: 1.0, order: ScanOrder::Index }
    }
}

/// The balls `Ball(x, A eps_n)` for every level `n` and net member `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiresolutionFamily {
    nets: NestedNets,
    a: f64,
    balls: Vec<Ball>,
}

/// One ball per (level, member), level-major then index order.
pub fn build_family(nets: NestedNets, a: f64) -> Result<MultiresolutionFamily> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::invalid(format!("A must exceed 1, got {a}")));
    }
    let mut balls = Vec::new();
    for (n, members) in nets.levels() {
        let r = a * nets.epsilon(n);
        for &i in members {
            balls.push(Ball { center: nets.base.to_point(i), radius: r, level: n, center_index: i });
        }
    }
    Ok(MultiresolutionFamily { nets, a, balls })
}

impl MultiresolutionFamily {
    /// Nets and family for `k` with automatic `n0` / `n_max` where unset.
    pub fn for_points(k: &PointSet, a: f64, cfg: &NetConfig) -> Result<Self> {
        let n0 = match cfg.n0 {
            Some(n) => n,
            None => default_n0(k, cfg.scale)?,
        };
        let n_max = cfg.n_max.unwrap_or_else(|| auto_n_max(k, a, cfg.scale, n0));
        let nets = build_nested_nets_with(k, n0, n_max, cfg.scale, cfg.order)?;
        build_family(nets, a)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn nets(&self) -> &NestedNets {
        &self.nets
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Same centers and levels with radii multiplied by `factor`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        let mut out = build_family(self.nets.clone(), self.a * factor)?;
        out.a = self.a * factor;
        Ok(out)
    }

    /// Keeps exactly the balls `Q` such that `Γ` leaves `4Q`. The farthest
    /// point of a polyline from any center is a vertex, so vertices decide.
    pub fn g_filter(&self, gamma: &PolylineCurve) -> Self {
        let balls = self
            .balls
            .iter()
            .filter(|q| gamma.max_distance_from(q.center.coords()) > 4.0 * q.radius)
            .cloned()
            .collect();
        Self { nets: self.nets.clone(), a: self.a, balls }
    }

    pub fn dump(&self) -> NetsDump {
        NetsDump {
            a: self.a,
            levels: self.nets.levels().map(|(n, m)| LevelDump { n, members: m.to_vec() }).collect(),
        }
    }
}

/// JSON layout of a net/family dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetsDump {
    #[serde(rename = "A")]
    pub a: f64,
    pub levels: Vec<LevelDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub n: i32,
    pub members: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointSet {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        PointSet::from_rows(&rows).unwrap()
    }

    #[test]
    fn one_dimensional_example() {
        let k = line(&[0.0, 0.3, 0.6, 1.0]);
        let nets = build_nested_nets(&k, 0, 1).unwrap();
        assert_eq!(nets.level(0).unwrap(), &[0]);
        assert_eq!(nets.level(1).unwrap(), &[0, 2]);
        nets.check_invariants().unwrap();
    }

    #[test]
    fn singleton_is_its_own_net() {
        let k = line(&[0.7]);
        let nets = build_nested_nets(&k, -3, 5).unwrap();
        for (_, m) in nets.levels() {
            assert_eq!(m, &[0]);
        }
    }

    #[test]
    fn fine_levels_take_every_point() {
        let k = line(&[0.0, 0.3, 0.6, 1.0]);
        // 2^-2 = 0.25 < min gap 0.3
        let nets = build_nested_nets(&k, 0, 2).unwrap();
        assert_eq!(nets.level(2).unwrap(), &[0, 1, 2, 3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_nested_nets(&PointSet::new(2).unwrap(), 0, 1), Err(Error::EmptySet)));
        assert!(build_nested_nets(&line(&[0.0]), 2, 1).is_err());
        let nets = build_nested_nets(&line(&[0.0]), 0, 1).unwrap();
        assert!(build_family(nets, 1.0).is_err());
    }

    #[test]
    fn family_counts_and_radii() {
        let k = line(&[0.0, 0.3, 0.6, 1.0]);
        let nets = build_nested_nets(&k, 0, 1).unwrap();
        let fam = build_family(nets, 4.0).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam.balls()[0].radius, 4.0);
        assert_eq!(fam.balls()[1].radius, 2.0);
        let nets = build_nested_nets(&k, 2, 2).unwrap();
        let fam = build_family(nets, 4.0).unwrap();
        assert!(fam.balls().iter().all(|b| b.radius == 1.0 && b.level == 2));
    }

    #[test]
    fn isometry_keeps_centers() {
        let k = line(&[0.0, 0.3, 0.6, 1.0]);
        let moved = k.map(1, |p| vec![5.0 - p[0]]).unwrap();
        let a = build_family(build_nested_nets(&k, 0, 3).unwrap(), 4.0).unwrap();
        let b = build_family(build_nested_nets(&moved, 0, 3).unwrap(), 4.0).unwrap();
        let ids = |f: &MultiresolutionFamily| f.balls().iter().map(|q| (q.level, q.center_index)).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
    }

    #[test]
    fn default_levels() {
        let k = line(&[0.0, 1.0]);
        assert_eq!(default_n0(&k, 1.0).unwrap(), 0);
        let k = line(&[0.0, 0.75]);
        assert_eq!(default_n0(&k, 1.0).unwrap(), 0);
        let k = line(&[0.0, 0.5]);
        assert_eq!(default_n0(&k, 1.0).unwrap(), 1);
        let k = line(&[0.0, 0.1, 1.0]);
        let n = auto_n_max(&k, 4.0, 1.0, 0);
        assert!(4.0 * (-(n as f64)).exp2() < 0.1);
    }

    #[test]
    fn g_filter_examples() {
        let k = PointSet::from_rows(&[[0.0, 0.0], [100.0, 0.0]]).unwrap();
        let gamma = PolylineCurve::new(k.clone());
        let nets = build_nested_nets(&k, -7, 3).unwrap();
        let fam = build_family(nets, 4.0).unwrap();
        let kept = fam.g_filter(&gamma);
        // Huge balls swallow the segment; small ones are left by it.
        assert!(kept.balls().iter().all(|q| 4.0 * q.radius < 100.0));
        assert!(kept.len() < fam.len());
        let mid = Ball::new(crate::geometry::Point::new(vec![50.0, 0.0]).unwrap(), 1.0).unwrap();
        assert!(gamma.max_distance_from(mid.center.coords()) > 4.0 * mid.radius);
    }

    #[test]
    fn dump_layout() {
        let k = line(&[0.0, 0.3, 0.6, 1.0]);
        let fam = build_family(build_nested_nets(&k, 0, 1).unwrap(), 4.0).unwrap();
        let json = serde_json::to_string(&fam.dump()).unwrap();
        assert_eq!(json, r#"{"A":4.0,"levels":[{"n":0,"members":[0]},{"n":1,"members":[0,2]}]}"#);
    }
}
