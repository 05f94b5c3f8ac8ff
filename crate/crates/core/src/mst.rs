//! Exact Euclidean minimum spanning tree and the doubled-edge Euler tour.

use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;
use crate::error::{Error, Result};
use crate::geometry::{dist, PointSet};
use crate::graph::GeometricGraph;

/// Prim's algorithm on the complete graph in `O(n²)` time and `O(n)` extra
/// memory. Edges are totally ordered by `(length, min index, max index)`,
/// which makes the tree unique and independent of the algorithm.
pub fn mst(k: &PointSet) -> Result<GeometricGraph> {
    let n = k.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut g = GeometricGraph::new(k.clone());
    let mut in_tree = vec![false; n];
    // (length, lo, hi) of the best edge into the tree.
    let mut key: Vec<(f64, usize, usize)> = vec![(f64::INFINITY, usize::MAX, usize::MAX); n];
    in_tree[0] = true;
    for v in 1..n {
        key[v] = (dist(k.point(0), k.point(v)), 0, v);
    }
    for _ in 1..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (pick == usize::MAX || less(key[v], key[pick])) {
                pick = v;
            }
        }
        let (_, lo, hi) = key[pick];
        in_tree[pick] = true;
        g.add_edge(lo, hi)?;
        let p = k.point(pick);
        for v in 0..n {
            if !in_tree[v] {
                let cand = (dist(p, k.point(v)), pick.min(v), pick.max(v));
                if less(cand, key[v]) {
                    key[v] = cand;
                }
            }
        }
    }
    Ok(g)
}

fn less(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).is_lt()
}

/// A closed tour through a graph with every edge walked once each way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerTour {
    /// Vertex indices; first and last coincide when there is an edge.
    pub sequence: Vec<usize>,
    pub curve: PolylineCurve,
}

impl EulerTour {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "vertex"])?;
        for (i, v) in self.sequence.iter().enumerate() {
            out.write_record([i.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Hierholzer's algorithm on the graph with every edge doubled (so every
/// degree is even), starting at vertex 0.
pub fn euler_parametrization(t: &GeometricGraph) -> Result<EulerTour> {
    let n = t.vertex_count();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if !t.is_connected() {
        return Err(Error::Disconnected);
    }
    // Half-edge 2e goes u→v, 2e+1 goes v→u; each is used once.
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in t.edges().iter().enumerate() {
        out[e.u].push(2 * i);
        out[e.v].push(2 * i + 1);
    }
    let head = |h: usize| {
        let e = t.edges()[h / 2];
        if h.is_multiple_of(2) { e.v } else { e.u }
    };
    let mut next = vec![0usize; n];
    let mut stack = vec![0usize];
    let mut sequence = Vec::with_capacity(2 * t.edges().len() + 1);
    while let Some(&v) = stack.last() {
        if next[v] < out[v].len() {
            let h = out[v][next[v]];
            next[v] += 1;
            stack.push(head(h));
        } else {
            sequence.push(v);
            stack.pop();
        }
    }
    sequence.reverse();
    let curve = PolylineCurve::new(t.vertices().select(&sequence));
    Ok(EulerTour { sequence, curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_corners() {
        let k = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let t = mst(&k).unwrap();
        assert_eq!(t.total_length(), 3.0);
        assert_eq!(t.edges().len(), 3);
    }

    #[test]
    fn collinear_chain_and_singleton() {
        let k = PointSet::from_rows(&[[0.0], [3.0], [1.0], [2.0]]).unwrap();
        let t = mst(&k).unwrap();
        assert_eq!(t.total_length(), 3.0);
        let one = PointSet::from_rows(&[[5.0, 5.0]]).unwrap();
        let t = mst(&one).unwrap();
        assert!(t.edges().is_empty());
        assert!(matches!(mst(&PointSet::new(2).unwrap()), Err(Error::EmptySet)));
    }

    #[test]
    fn tours() {
        let mut g = GeometricGraph::new(PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap());
        g.add_edge(0, 1).unwrap();
        let tour = euler_parametrization(&g).unwrap();
        assert_eq!(tour.curve.length(), 2.0);
        assert_eq!(tour.sequence, vec![0, 1, 0]);

        let mut star = GeometricGraph::new(PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]).unwrap());
        for v in 1..4 {
            star.add_edge(0, v).unwrap();
        }
        let tour = euler_parametrization(&star).unwrap();
        assert_eq!(tour.curve.length(), 6.0);
        assert_eq!(tour.sequence.first(), tour.sequence.last());

        let apart = GeometricGraph::new(PointSet::from_rows(&[[0.0], [1.0]]).unwrap());
        assert!(matches!(euler_parametrization(&apart), Err(Error::Disconnected)));
    }
}
