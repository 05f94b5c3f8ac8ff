#![allow(dead_code)]

use atsp_core::{distance, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_set(rng: &mut impl Rng, n: usize, dim: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    PointSet::from_rows(&rows).unwrap()
}

/// Every labelled tree on `n` vertices, decoded from its Prüfer sequence.
pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let total = n.pow(n as u32 - 2);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..n - 2)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            decode(&seq, n)
        })
        .collect()
}

fn decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Shortest spanning tree by enumeration: its length and sorted edges.
pub fn brute_force_mst(k: &PointSet) -> (f64, Vec<(usize, usize)>) {
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    for mut t in all_trees(k.len()) {
        let len: f64 = t.iter().map(|&(u, v)| distance(k.point(u), k.point(v)).unwrap()).sum();
        if best.as_ref().is_none_or(|b| len < b.0) {
            t.sort_unstable();
            best = Some((len, t));
        }
    }
    best.unwrap()
}

pub fn sorted_edges(g: &atsp_core::GeometricGraph) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    e.sort_unstable();
    e
}
