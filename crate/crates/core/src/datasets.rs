//! Deterministic test sets and random isometric embeddings.

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::io::read_points_csv;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetKind {
    /// Vertices of the `k`-th Koch iterate over `[0, 1]`.
    Koch { k: u32 },
    /// Regular `n`-gon on the unit circle.
    Circle { n: usize },
    /// `n` points on an Archimedean spiral of radius 1 with `turns` turns.
    Spiral { n: usize, turns: f64 },
    /// Interval endpoints of the `k`-th stage of the 1/4-Cantor set.
    Cantor4 { k: u32 },
    /// `n` steps of length `step` in uniformly random directions of `R^dim`.
    RandomWalk { n: usize, step: f64, dim: usize },
    UniformSquare { n: usize },
    /// `n` evenly spaced points on `[0, 1] × {0}`.
    Collinear { n: usize },
    CustomFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(flatten)]
    pub kind: DatasetKind,
    #[serde(default)]
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// Short stable name, e.g. `koch-5` or `uniform_square-500`.
    pub fn id(&self) -> String {
        match &self.kind {
            DatasetKind::Koch { k } => format!("koch-{k}"),
            DatasetKind::Circle { n } => format!("circle-{n}"),
            DatasetKind::Spiral { n, turns } => format!("spiral-{n}-{turns}"),
            DatasetKind::Cantor4 { k } => format!("cantor4-{k}"),
            DatasetKind::RandomWalk { n, dim, .. } => format!("random_walk-{n}-d{dim}"),
            DatasetKind::UniformSquare { n } => format!("uniform_square-{n}"),
            DatasetKind::Collinear { n } => format!("collinear-{n}"),
            DatasetKind::CustomFile { path } => format!("file-{}", path.display()),
        }
    }
}

/// A point set and, when the data has one, the curve through it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub points: PointSet,
    pub curve: Option<PolylineCurve>,
}

pub fn generate(spec: &DatasetSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (points, curve) = match &spec.kind {
        DatasetKind::Koch { k } => {
            let c = koch(*k)?;
            (c.vertices().clone(), Some(c))
        }
        DatasetKind::Circle { n } => {
            let k = circle(*n)?;
            let c = PolylineCurve::new(k.clone()).closed();
            (k, Some(c))
        }
        DatasetKind::Spiral { n, turns } => {
            let k = spiral(*n, *turns)?;
            (k.clone(), Some(PolylineCurve::new(k)))
        }
        DatasetKind::Cantor4 { k } => (cantor4(*k)?, None),
        DatasetKind::RandomWalk { n, step, dim } => {
            let k = random_walk(*n, *step, *dim, &mut rng)?;
            (k.clone(), Some(PolylineCurve::new(k)))
        }
        DatasetKind::UniformSquare { n } => (uniform_square(*n, &mut rng)?, None),
        DatasetKind::Collinear { n } => {
            let k = collinear(*n)?;
            (k.clone(), Some(PolylineCurve::new(k)))
        }
        DatasetKind::CustomFile { path } => (read_points_csv(std::fs::File::open(path)?)?, None),
    };
    Ok(Dataset { id: spec.id(), points, curve })
}

pub fn koch(k: u32) -> Result<PolylineCurve> {
    if k > 10 {
        return Err(Error::invalid(format!("koch iterate {k} is too deep (max 10)")));
    }
    let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [1.0, 0.0]];
    let (s, c) = (PI / 3.0).sin_cos();
    for _ in 0..k {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let d = [(q[0] - p[0]) / 3.0, (q[1] - p[1]) / 3.0];
            let a = [p[0] + d[0], p[1] + d[1]];
            let b = [p[0] + 2.0 * d[0], p[1] + 2.0 * d[1]];
            let tip = [a[0] + c * d[0] - s * d[1], a[1] + s * d[0] + c * d[1]];
            next.extend_from_slice(&[p, a, tip, b]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    PolylineCurve::from_rows(&pts)
}

pub fn circle(n: usize) -> Result<PointSet> {
    if n < 3 {
        return Err(Error::invalid("circle needs at least 3 points"));
    }
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointSet::from_rows(&rows)
}

pub fn spiral(n: usize, turns: f64) -> Result<PointSet> {
    if n < 2 || !(turns > 0.0 && turns.is_finite()) {
        return Err(Error::invalid("spiral needs n >= 2 and positive turns"));
    }
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            let t = 2.0 * PI * turns * s;
            [s * t.cos(), s * t.sin()]
        })
        .collect();
    PointSet::from_rows(&rows)
}

pub fn cantor4(k: u32) -> Result<PointSet> {
    if k > 16 {
        return Err(Error::invalid(format!("cantor stage {k} is too deep (max 16)")));
    }
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 0..k {
        intervals = intervals
            .iter()
            .flat_map(|&(a, b)| {
                let q = (b - a) / 4.0;
                [(a, a + q), (b - q, b)]
            })
            .collect();
    }
    let rows: Vec<[f64; 1]> = intervals.iter().flat_map(|&(a, b)| [[a], [b]]).collect();
    PointSet::from_rows(&rows)
}

pub fn random_walk(n: usize, step: f64, dim: usize, rng: &mut impl Rng) -> Result<PointSet> {
    if n == 0 || dim == 0 || !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("random walk needs n >= 1, dim >= 1 and a positive step"));
    }
    let mut k = PointSet::new(dim)?;
    let mut x = vec![0.0; dim];
    k.push(&x)?;
    for _ in 1..n {
        let dir = loop {
            let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break g.into_iter().map(|v| v / norm).collect::<Vec<_>>();
            }
        };
        for (c, d) in x.iter_mut().zip(&dir) {
            *c += step * d;
        }
        k.push(&x)?;
    }
    Ok(k)
}

pub fn uniform_square(n: usize, rng: &mut impl Rng) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::invalid("uniform_square needs n >= 1"));
    }
    let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    PointSet::from_rows(&rows)
}

pub fn collinear(n: usize) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::invalid("collinear needs n >= 2"));
    }
    let rows: Vec<[f64; 2]> = (0..n).map(|i| [i as f64 / (n - 1) as f64, 0.0]).collect();
    PointSet::from_rows(&rows)
}

/// `x ↦ M x + t` with `M` having orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<f64>,
    translation: Vec<f64>,
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), translation: vec![0.0; dim] }
    }

    /// Random isometric map `R^from → R^to`: the first `from` columns of
    /// the orthogonal factor of a Gaussian matrix, and a translation drawn
    /// uniformly from `[-1, 1]^to`.
    pub fn random(from: usize, to: usize, seed: u64) -> Result<Self> {
        if from == 0 || to < from {
            return Err(Error::invalid(format!("cannot embed dimension {from} into {to}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::<f64>::from_fn(to, to, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        let matrix = q.columns(0, from).into_owned();
        let translation = (0..to).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Ok(Self { matrix, translation })
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, k: &PointSet) -> Result<PointSet> {
        if k.dim() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), got: k.dim() });
        }
        let (rows, cols) = (self.target_dim(), self.source_dim());
        k.map(rows, |p| {
            (0..rows)
                .map(|r| (0..cols).map(|c| self.matrix[(r, c)] * p[c]).sum::<f64>() + self.translation[r])
                .collect()
        })
    }
}

/// `K` mapped into `R^D` by a seeded random isometry.
pub fn embed_isometric(k: &PointSet, dim: usize, seed: u64) -> Result<PointSet> {
    Isometry::random(k.dim(), dim, seed)?.apply(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    #[test]
    fn koch_counts_and_length() {
        let k0 = koch(0).unwrap();
        assert_eq!(k0.vertex_count(), 2);
        assert_eq!(k0.length(), 1.0);
        for k in 1..=6 {
            let c = koch(k).unwrap();
            assert_eq!(c.vertex_count(), 4usize.pow(k) + 1);
            assert!((c.length() - (4.0f64 / 3.0).powi(k as i32)).abs() < 1e-9);
        }
        // The first bump points up.
        assert!(koch(1).unwrap().vertices().point(2)[1] > 0.0);
    }

    #[test]
    fn cantor_first_stage() {
        let c = cantor4(1).unwrap();
        let xs: Vec<f64> = c.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.75, 1.0]);
        assert_eq!(cantor4(3).unwrap().len(), 16);
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = DatasetSpec::new(DatasetKind::UniformSquare { n: 50 }, 9);
        assert_eq!(generate(&spec).unwrap().points, generate(&spec).unwrap().points);
        let other = DatasetSpec::new(DatasetKind::UniformSquare { n: 50 }, 10);
        assert_ne!(generate(&spec).unwrap().points, generate(&other).unwrap().points);
    }

    #[test]
    fn random_walk_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_walk(20, 0.5, 3, &mut rng).unwrap();
        for i in 1..w.len() {
            assert!((dist(w.point(i - 1), w.point(i)) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_distances() {
        let sq = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let same = Isometry::identity(2).apply(&sq).unwrap();
        assert_eq!(same, sq);
        let e = embed_isometric(&sq, 64, 3).unwrap();
        assert_eq!(e.dim(), 64);
        for i in 0..4 {
            for j in 0..4 {
                assert!((dist(e.point(i), e.point(j)) - dist(sq.point(i), sq.point(j))).abs() < 1e-9);
            }
        }
        assert!(embed_isometric(&sq, 1, 0).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DatasetSpec::new(DatasetKind::Spiral { n: 10, turns: 2.0 }, 4);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"spiral","n":10,"turns":2.0,"seed":4}"#);
        assert_eq!(serde_json::from_str::<DatasetSpec>(&json).unwrap(), spec);
    }
}
