//! The Jones square sum, the Jones function and the integral functional.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::{beta_of, oracle_of, LineSearch};
use crate::curve::{require_positive_length, PolylineCurve};
use crate::error::{Error, Result};
use crate::geometry::{clip_segment, diameter, dist, lerp, segment_dist, Ball, Point, PointSet};
use crate::nets::MultiresolutionFamily;

/// The set whose flatness is measured inside each ball.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Points(&'a PointSet),
    Curve(&'a PolylineCurve),
}

impl Target<'_> {
    fn dim(&self) -> usize {
        match self {
            Target::Points(s) => s.dim(),
            Target::Curve(c) => c.dim(),
        }
    }
}

/// How per-ball betas are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaSource {
    #[default]
    Auto,
    CandidateAxes,
    /// Planar grid oracle with the given number of directions.
    Oracle2d(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JonesOptions {
    pub beta: BetaSource,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallTerm {
    pub level: i32,
    pub center_index: usize,
    pub beta: f64,
    pub diam: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JonesReport {
    pub per_ball: Vec<BallTerm>,
    pub total_sum: f64,
    pub diam_k: f64,
    pub rhs: f64,
    /// Closed-form sum over all levels finer than the family's last, for
    /// curve targets once that level has settled (see [`jones_sum`]).
    pub tail: Option<f64>,
}

impl JonesReport {
    /// `total_sum` plus the tail when there is one.
    pub fn completed_sum(&self) -> f64 {
        self.total_sum + self.tail.unwrap_or(0.0)
    }

    /// `J(x)` from the cached betas; `family` must be the one the report
    /// was computed on.
    pub fn function_at(&self, family: &MultiresolutionFamily, x: &[f64]) -> f64 {
        family
            .balls()
            .iter()
            .zip(&self.per_ball)
            .filter(|(q, _)| q.contains(x))
            .map(|(_, t)| t.beta * t.beta)
            .sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for t in &self.per_ball {
            out.serialize(t)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `Σ β²(Q) diam(Q)` over the family, with `β` taken against `target`.
///
/// For a curve target the family is extended in closed form when its
/// finest level holds every point of `K` and each of its balls meets the
/// curve only in segments through the center. `Γ ∩ Q` is then a union of
/// rays from the center for that ball and every finer one, so `β` stays
/// fixed while `diam` halves, and the infinite remainder equals the finest
/// level's own contribution.
pub fn jones_sum(family: &MultiresolutionFamily, target: Target<'_>) -> Result<JonesReport> {
    jones_sum_with(family, target, JonesOptions::default())
}

pub fn jones_sum_with(
    family: &MultiresolutionFamily,
    target: Target<'_>,
    opts: JonesOptions,
) -> Result<JonesReport> {
    if family.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = family.nets().base().dim();
    if target.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: target.dim() });
    }
    if matches!(opts.beta, BetaSource::Oracle2d(_)) && dim != 2 {
        return Err(Error::invalid(format!("grid oracle needs dimension 2, got {dim}")));
    }
    let betas = run_pool(opts.threads, || {
        family.balls().par_iter().map(|q| ball_beta(q, target, opts.beta)).collect::<Result<Vec<f64>>>()
    })??;
    let per_ball: Vec<BallTerm> = family
        .balls()
        .iter()
        .zip(betas)
        .map(|(q, beta)| BallTerm {
            level: q.level,
            center_index: q.center_index,
            beta,
            diam: q.diam(),
            contribution: beta * beta * q.diam(),
        })
        .collect();
    // Sequential in ball order so the total is independent of thread count.
    let total_sum: f64 = per_ball.iter().map(|t| t.contribution).sum();
    let diam_k = diameter(family.nets().base())?;
    let tail = match target {
        Target::Curve(c) => settled_tail(family, c, &per_ball),
        Target::Points(_) => None,
    };
    Ok(JonesReport { per_ball, total_sum, diam_k, rhs: diam_k + total_sum, tail })
}

fn settled_tail(family: &MultiresolutionFamily, c: &PolylineCurve, per_ball: &[BallTerm]) -> Option<f64> {
    let nets = family.nets();
    let last = nets.n_max();
    if nets.level(last)?.len() != nets.base().len() {
        return None;
    }
    let mut tail = 0.0;
    for (q, t) in family.balls().iter().zip(per_ball).filter(|(q, _)| q.level == last) {
        let center = q.center.coords();
        let settled = c.segments().all(|(a, b)| {
            clip_segment(a, b, center, q.radius).is_none() || segment_dist(center, a, b) <= 1e-12 * q.radius
        });
        if !settled {
            return None;
        }
        tail += t.contribution;
    }
    Some(tail)
}

pub(crate) fn run_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn ball_beta(q: &Ball, target: Target<'_>, source: BetaSource) -> Result<f64> {
    let owned: Vec<Vec<f64>>;
    let pts: Vec<&[f64]> = match target {
        Target::Points(s) => s.iter().filter(|p| q.contains(p)).collect(),
        Target::Curve(c) => {
            owned = c.clipped_endpoints(q);
            owned.iter().map(Vec::as_slice).collect()
        }
    };
    Ok(match source {
        BetaSource::Auto => beta_of(&pts, q, LineSearch::Auto).value,
        BetaSource::CandidateAxes => beta_of(&pts, q, LineSearch::CandidateAxesOnly).value,
        BetaSource::Oracle2d(grid) => oracle_of(&pts, q, grid)?.value,
    })
}

/// `J(x) = Σ β²(Q) χ_Q(x)`.
pub fn jones_function(x: &[f64], family: &MultiresolutionFamily, target: Target<'_>) -> Result<f64> {
    let mut acc = 0.0;
    for q in family.balls().iter().filter(|q| q.contains(x)) {
        let b = ball_beta(q, target, BetaSource::Auto)?;
        acc += b * b;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Part of `value` from scales above `diam(Γ)`, in closed form.
    pub tail: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Strata skipped because the clipped length came out zero.
    pub zero_length_warnings: usize,
}

/// Estimate of `∫_0^∞ ∫_Γ β_Γ²(Ball(x, A t)) / H¹(Γ ∩ Ball(x, t)) dx dt`.
///
/// `x` runs over `x_samples` arclength midpoints. `t` runs over dyadic
/// octaves from below the shortest segment up to `T = 2^⌈log2 diam⌉`, each
/// split into `t_levels` equal strata evaluated at their midpoints. Beyond
/// `T` the ball holds all of `Γ`, so the integrand is `(w / 2At)² / ℓ` with
/// `w` the width of `Γ`, and the tail integrates to `w² / (4 A² T)`.
pub fn integral_estimate(gamma: &PolylineCurve, a: f64, x_samples: usize, t_levels: usize) -> Result<IntegralEstimate> {
    let len = require_positive_length(gamma)?;
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::invalid(format!("A must exceed 1, got {a}")));
    }
    if x_samples == 0 || t_levels == 0 {
        return Err(Error::invalid("x_samples and t_levels must be positive"));
    }
    let diam = diameter(gamma.vertices())?;
    let min_seg = gamma
        .segments()
        .map(|(p, q)| dist(p, q))
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let lo = min_seg.log2().floor() as i32 - 1;
    let hi = (diam.log2().ceil() as i32).max(lo + 1);
    let t_min = f64::from(lo).exp2();
    let t_max = f64::from(hi).exp2();

    let mut strata = Vec::new();
    for m in lo..hi {
        let base = f64::from(m).exp2();
        let dt = base / t_levels as f64;
        for i in 0..t_levels {
            strata.push((base + (i as f64 + 0.5) * dt, dt));
        }
    }
    let whole = Ball {
        center: Point::from_vec_unchecked(gamma.vertices().point(0).to_vec()),
        radius: 2.0 * diam.max(f64::MIN_POSITIVE),
        level: 0,
        center_index: 0,
    };
    let verts: Vec<&[f64]> = gamma.vertices().iter().collect();
    let width = beta_of(&verts, &whole, LineSearch::Auto).value * whole.diam();
    let dx = len / x_samples as f64;
    let segs: Vec<(&[f64], &[f64])> = gamma.segments().collect();
    let parts: Vec<(f64, usize)> = (0..x_samples)
        .into_par_iter()
        .map(|j| {
            let x = gamma.point_at((j as f64 + 0.5) * dx);
            // Segments by distance from x: a ball of radius r only meets a
            // prefix of this list.
            let mut near: Vec<(f64, usize)> =
                segs.iter().enumerate().map(|(i, (p, q))| (segment_dist(&x, p, q), i)).collect();
            near.sort_by(|u, v| u.0.total_cmp(&v.0));
            let mut acc = 0.0;
            let mut warnings = 0;
            let reach = gamma.max_distance_from(&x);
            let mut pts: Vec<Vec<f64>> = Vec::new();
            for &(t, dt) in &strata {
                let mut h = 0.0;
                for &(_, i) in near.iter().take_while(|e| e.0 <= t) {
                    let (p, q) = segs[i];
                    if let Some((t0, t1)) = clip_segment(p, q, &x, t) {
                        h += (t1 - t0) * dist(p, q);
                    }
                }
                if h <= 0.0 {
                    warnings += 1;
                    continue;
                }
                let r = a * t;
                if r >= reach {
                    // The ball holds all of Γ.
                    let b = (width / (2.0 * r)).min(1.0);
                    acc += b * b / h * dt;
                    continue;
                }
                pts.clear();
                for &(_, i) in near.iter().take_while(|e| e.0 <= r) {
                    let (p, q) = segs[i];
                    if let Some((t0, t1)) = clip_segment(p, q, &x, r) {
                        pts.push(lerp(p, q, t0));
                        pts.push(lerp(p, q, t1));
                    }
                }
                let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
                let big = Ball { center: Point::from_vec_unchecked(x.clone()), radius: r, level: 0, center_index: 0 };
                let b = beta_of(&refs, &big, LineSearch::Auto).value;
                acc += b * b / h * dt;
            }
            (acc * dx, warnings)
        })
        .collect();
    let body: f64 = parts.iter().map(|p| p.0).sum();
    let zero_length_warnings = parts.iter().map(|p| p.1).sum();

    let tail = width * width / (4.0 * a * a * t_max);
    Ok(IntegralEstimate { value: body + tail, tail, t_min, t_max, zero_length_warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{build_family, build_nested_nets, NetConfig};

    fn square() -> PointSet {
        PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    #[test]
    fn collinear_points_sum_to_zero() {
        let rows: Vec<[f64; 2]> = (0..20).map(|i| [i as f64 / 19.0, 0.0]).collect();
        let k = PointSet::from_rows(&rows).unwrap();
        let fam = MultiresolutionFamily::for_points(&k, 4.0, &NetConfig::default()).unwrap();
        let r = jones_sum(&fam, Target::Points(&k)).unwrap();
        assert_eq!(r.total_sum, 0.0);
        assert_eq!(r.rhs, 1.0);
        assert_eq!(jones_function(&[0.5, 0.0], &fam, Target::Points(&k)).unwrap(), 0.0);
    }

    #[test]
    fn unit_square_matches_hand_sum() {
        let k = square();
        let fam = build_family(build_nested_nets(&k, -2, 1).unwrap(), 4.0).unwrap();
        let r = jones_sum(&fam, Target::Points(&k)).unwrap();
        // Every ball with all four corners has beta = 1 / (2 radius): the
        // thinnest slab around the square has width 1.
        let mut hand = 0.0;
        for q in fam.balls() {
            let inside = k.iter().filter(|p| q.contains(p)).count();
            let oracle = crate::beta::beta_oracle_2d(&k, q, 3600).unwrap().value;
            if inside == 4 {
                assert!((oracle - 1.0 / q.diam()).abs() < 1e-12);
            }
            if inside <= 2 {
                assert_eq!(oracle, 0.0);
            }
            hand += oracle * oracle * q.diam();
        }
        assert!(r.total_sum > 0.0);
        assert!((r.total_sum - hand).abs() < 1e-12 * hand);
    }

    #[test]
    fn double_counting_identity() {
        let k = square();
        let fam = build_family(build_nested_nets(&k, -2, 2).unwrap(), 4.0).unwrap();
        let r = jones_sum(&fam, Target::Points(&k)).unwrap();
        let lhs: f64 = k.iter().map(|p| r.function_at(&fam, p)).sum();
        let rhs: f64 = fam
            .balls()
            .iter()
            .zip(&r.per_ball)
            .map(|(q, t)| t.beta * t.beta * k.iter().filter(|p| q.contains(p)).count() as f64)
            .sum();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        assert_eq!(jones_function(&[100.0, 100.0], &fam, Target::Points(&k)).unwrap(), 0.0);
    }

    #[test]
    fn csv_rows() {
        let k = square();
        let fam = build_family(build_nested_nets(&k, 0, 0).unwrap(), 4.0).unwrap();
        let r = jones_sum(&fam, Target::Points(&k)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,center_index,beta,diam,contribution\n0,0,"));
    }

    #[test]
    fn straight_segment_integral_is_zero() {
        let seg = PolylineCurve::from_rows(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]]).unwrap();
        let est = integral_estimate(&seg, 4.0, 32, 2).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.zero_length_warnings, 0);
        let flat = PolylineCurve::from_rows(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(integral_estimate(&flat, 4.0, 8, 1).is_err());
    }

    #[test]
    fn settled_tail_closes_the_sum() {
        let c = PolylineCurve::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let sums: Vec<f64> = (4..8)
            .map(|n_max| {
                let cfg = NetConfig { n_max: Some(n_max), ..Default::default() };
                let fam = MultiresolutionFamily::for_points(c.vertices(), 4.0, &cfg).unwrap();
                let r = jones_sum(&fam, Target::Curve(&c)).unwrap();
                assert!(r.tail.unwrap() > 0.0);
                r.completed_sum()
            })
            .collect();
        for s in &sums[1..] {
            assert!((s - sums[0]).abs() <= 1e-12 * sums[0]);
        }
        let cfg = NetConfig { n_max: Some(0), ..Default::default() };
        let coarse = MultiresolutionFamily::for_points(c.vertices(), 4.0, &cfg).unwrap();
        assert_eq!(jones_sum(&coarse, Target::Curve(&c)).unwrap().tail, None);
    }
}
