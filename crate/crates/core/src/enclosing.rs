//! Minimum enclosing ball in any dimension (move-to-front Welzl).

use crate::geometry::{dist, dot, sub};

#[derive(Debug, Clone)]
pub(crate) struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    fn covers(&self, p: &[f64]) -> bool {
        self.radius >= 0.0 && dist(&self.center, p) <= self.radius * (1.0 + 1e-10) + 1e-300
    }
}

/// Smallest ball containing `points`. The returned radius is the exact
/// largest distance from the returned center, so the ball always encloses
/// the input even when a degenerate support set forces a fallback.
pub(crate) fn min_enclosing_ball(points: &[Vec<f64>]) -> Sphere {
    assert!(!points.is_empty(), "min_enclosing_ball needs at least one point");
    let dim = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut support = Vec::with_capacity(dim + 1);
    let mut ball = move_to_front(points, &mut order, points.len(), &mut support, dim);
    ball.radius = points.iter().map(|p| dist(p, &ball.center)).fold(0.0, f64::max);
    ball
}

fn move_to_front(
    points: &[Vec<f64>],
    order: &mut [usize],
    end: usize,
    support: &mut Vec<usize>,
    dim: usize,
) -> Sphere {
    let mut ball = circumsphere(points, support);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let p = order[i];
        if !ball.covers(&points[p]) {
            support.push(p);
            ball = move_to_front(points, order, i, support, dim);
            support.pop();
            order[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest sphere through all support points, computed in their affine
/// span from the Gram system.
fn circumsphere(points: &[Vec<f64>], support: &[usize]) -> Sphere {
    match support {
        [] => Sphere { center: vec![0.0; points.first().map_or(0, Vec::len)], radius: -1.0 },
        [a] => Sphere { center: points[*a].clone(), radius: 0.0 },
        [first, rest @ ..] => {
            let s0 = &points[*first];
            let vs: Vec<Vec<f64>> = rest.iter().map(|&j| sub(&points[j], s0)).collect();
            let k = vs.len();
            let mut g = vec![vec![0.0; k + 1]; k];
            for i in 0..k {
                for j in 0..k {
                    g[i][j] = dot(&vs[i], &vs[j]);
                }
                g[i][k] = 0.5 * g[i][i];
            }
            match solve(g) {
                Some(lambda) => {
                    let mut center = s0.clone();
                    for (l, v) in lambda.iter().zip(&vs) {
                        for (c, x) in center.iter_mut().zip(v) {
                            *c += l * x;
                        }
                    }
                    let radius = support.iter().map(|&j| dist(&points[j], &center)).fold(0.0, f64::max);
                    Sphere { center, radius }
                }
                None => fallback(points, support),
            }
        }
    }
}

/// Ball on the farthest support pair, widened to cover the rest.
fn fallback(points: &[Vec<f64>], support: &[usize]) -> Sphere {
    let mut best = (support[0], support[0], -1.0);
    for (x, &i) in support.iter().enumerate() {
        for &j in &support[x + 1..] {
            let d = dist(&points[i], &points[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let center: Vec<f64> = points[best.0].iter().zip(&points[best.1]).map(|(a, b)| 0.5 * (a + b)).collect();
    let radius = support.iter().map(|&j| dist(&points[j], &center)).fold(0.0, f64::max);
    Sphere { center, radius }
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// system. `None` when the matrix is numerically singular.
fn solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = m.len();
    let scale = (0..k).map(|i| m[i][i].abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..=k {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = m[row][k];
        for c in row + 1..k {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}
