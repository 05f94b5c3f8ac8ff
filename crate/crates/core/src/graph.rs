//! Geometric graphs: points joined by straight edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricGraph {
    vertices: PointSet,
    edges: Vec<Edge>,
}

impl GeometricGraph {
    pub fn new(vertices: PointSet) -> Self {
        Self { vertices, edges: Vec::new() }
    }

    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn add_vertex(&mut self, p: &[f64]) -> Result<usize> {
        self.vertices.push(p)?;
        Ok(self.vertices.len() - 1)
    }

    /// Adds the straight edge `u–v`; its length is the Euclidean distance.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertices.len();
        if u >= n || v >= n {
            return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        let length = dist(self.vertices.point(u), self.vertices.point(v));
        self.edges.push(Edge { u, v, length });
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        total_length(self)
    }

    /// Neighbor lists, in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// True when every vertex is reachable from every other (vacuously for
    /// zero or one vertex).
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        uf.components() <= 1
    }

    /// Edge list as CSV rows `u,v,length`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for e in &self.edges {
            out.serialize(e)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Sum of edge lengths.
pub fn total_length(g: &GeometricGraph) -> f64 {
    g.edges.iter().map(|e| e.length).sum()
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.sets
    }
}
