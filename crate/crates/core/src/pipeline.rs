//! End-to-end comparison of the square sum against MST and construction
//! lengths on one dataset.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::construction::{construct, ConstructionParams};
use crate::datasets::{generate, Dataset, DatasetKind, DatasetSpec, Isometry};
use crate::error::{Error, Result};
use crate::jones::{jones_sum, Target};
use crate::mst::mst;
use crate::nets::{MultiresolutionFamily, NetConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Family constant for the square sums.
    pub a: f64,
    pub construction: ConstructionParams,
    pub nets: NetConfig,
    /// Embed isometrically into this dimension first, if larger than the
    /// native one.
    pub dim: Option<usize>,
    pub embed_seed: u64,
    pub skip_construction: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            a: 4.0,
            construction: ConstructionParams::default(),
            nets: NetConfig::default(),
            dim: None,
            embed_seed: 0,
            skip_construction: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub a: f64,
    pub eps0: f64,
    pub g_length: f64,
    pub h_length: f64,
    pub union_length: f64,
    /// Square sum of `β_K` over the family with constant `A²`.
    pub jones_sum_a2: f64,
    /// `union_length / (diam + jones_sum_a2)`.
    pub c_meas: f64,
    pub case_counts: [usize; 6],
    pub p1_repairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub dataset: String,
    pub seed: u64,
    pub dim: usize,
    pub points: usize,
    pub a: f64,
    pub diam: f64,
    pub jones_sum_k: f64,
    /// Includes the closed-form tail past the finest level when it applies.
    pub jones_sum_gamma: Option<f64>,
    /// That tail alone.
    pub gamma_tail: Option<f64>,
    pub curve_length: Option<f64>,
    pub mst_length: f64,
    pub construction: Option<ConstructionSummary>,
    /// `(diam + jones_sum_k) / mst_length`.
    pub r1: f64,
    /// `H¹(G ∪ H) / (diam + jones_sum_k)`.
    pub r2: Option<f64>,
    /// `jones_sum_gamma / curve_length`.
    pub r3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ComparisonReport {
    pub fn without_timing(mut self) -> Self {
        self.timing = None;
        self
    }
}

pub fn compare(spec: &DatasetSpec, opts: &CompareOptions) -> Result<ComparisonReport> {
    let ds = generate(spec)?;
    compare_dataset(&ds, spec.seed, opts)
}

pub fn compare_dataset(ds: &Dataset, seed: u64, opts: &CompareOptions) -> Result<ComparisonReport> {
    let start = Instant::now();
    let (points, curve) = match opts.dim {
        Some(d) if d > ds.points.dim() => {
            let iso = Isometry::random(ds.points.dim(), d, opts.embed_seed)?;
            let curve = match &ds.curve {
                Some(c) => Some(crate::curve::PolylineCurve::new(iso.apply(c.vertices())?)),
                None => None,
            };
            (iso.apply(&ds.points)?, curve)
        }
        Some(d) if d < ds.points.dim() => {
            return Err(Error::invalid(format!("cannot embed dimension {} into {d}", ds.points.dim())))
        }
        _ => (ds.points.clone(), ds.curve.clone()),
    };
    if points.len() < 2 {
        return Err(Error::invalid("comparison needs at least 2 points"));
    }

    let family = MultiresolutionFamily::for_points(&points, opts.a, &opts.nets)?;
    family.nets().check_invariants()?;
    let report_k = jones_sum(&family, Target::Points(&points))?;
    let diam = report_k.diam_k;
    let rhs = report_k.rhs;
    let (jones_sum_gamma, gamma_tail, curve_length) = match &curve {
        Some(c) => {
            let r = jones_sum(&family, Target::Curve(c))?;
            (Some(r.completed_sum()), r.tail, Some(c.length()))
        }
        None => (None, None, None),
    };
    let mst_length = mst(&points)?.total_length();

    let construction = if opts.skip_construction {
        None
    } else {
        let p = opts.construction;
        let c = construct(&points, p)?;
        if !c.g.is_connected() {
            return Err(Error::Invariant("construction left G disconnected".into()));
        }
        let fam2 = MultiresolutionFamily::for_points(&points, p.a * p.a, &opts.nets)?;
        let js2 = jones_sum(&fam2, Target::Points(&points))?.total_sum;
        Some(ConstructionSummary {
            a: p.a,
            eps0: p.eps0,
            g_length: c.g_length(),
            h_length: c.h_length(),
            union_length: c.union_length,
            jones_sum_a2: js2,
            c_meas: c.union_length / (diam + js2),
            case_counts: c.case_counts(),
            p1_repairs: c.p1_repairs(),
        })
    };

    Ok(ComparisonReport {
        dataset: ds.id.clone(),
        seed,
        dim: points.dim(),
        points: points.len(),
        a: opts.a,
        diam,
        jones_sum_k: report_k.total_sum,
        jones_sum_gamma,
        gamma_tail,
        curve_length,
        mst_length,
        r1: rhs / mst_length,
        r2: construction.as_ref().map(|c| c.union_length / rhs),
        r3: jones_sum_gamma.zip(curve_length).map(|(j, l)| j / l),
        construction,
        timing: Some(Timing { total_ms: start.elapsed().as_secs_f64() * 1e3 }),
    })
}

/// Koch 1–6, a 64-gon, a spiral, Cantor stages 1–5, 500 uniform points in
/// the square and a 500-step walk in `R³`.
pub fn standard_suite() -> Vec<DatasetSpec> {
    let mut s: Vec<DatasetSpec> = (1..=6).map(|k| DatasetSpec::new(DatasetKind::Koch { k }, 0)).collect();
    s.push(DatasetSpec::new(DatasetKind::Circle { n: 64 }, 0));
    s.push(DatasetSpec::new(DatasetKind::Spiral { n: 400, turns: 3.0 }, 0));
    s.extend((1..=5).map(|k| DatasetSpec::new(DatasetKind::Cantor4 { k }, 0)));
    s.push(DatasetSpec::new(DatasetKind::UniformSquare { n: 500 }, 1));
    s.push(DatasetSpec::new(DatasetKind::RandomWalk { n: 500, step: 0.05, dim: 3 }, 2));
    s
}

/// The suite members that come with a curve.
pub fn curve_suite() -> Vec<DatasetSpec> {
    standard_suite()
        .into_iter()
        .filter(|s| matches!(s.kind, DatasetKind::Koch { .. } | DatasetKind::Circle { .. } | DatasetKind::Spiral { .. }))
        .collect()
}
