//! Brute-force convex oracle: a body is a list of half-spaces
//! `⟨a, x⟩ ≥ b` in any dimension, and its vertices are found by solving
//! every `dim`-subset of boundary equations and keeping the feasible
//! solutions.

use nalgebra::{DMatrix, DVector};

const FEAS_TOL: f64 = 1e-9;
const SAME_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct HalfSpaces {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl HalfSpaces {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            normals: Vec::new(),
            offsets: Vec::new(),
        }
    }

    pub fn push(&mut self, normal: Vec<f64>, offset: f64) {
        assert_eq!(normal.len(), self.dim);
        self.normals.push(normal);
        self.offsets.push(offset);
    }

    pub fn feasible(&self, x: &[f64]) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| dot(a, x) >= b - FEAS_TOL)
    }

    /// Distinct vertices of the body.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut out: Vec<Vec<f64>> = Vec::new();
        for idx in subsets(self.normals.len(), d) {
            let a = DMatrix::from_fn(d, d, |r, c| self.normals[idx[r]][c]);
            let b = DVector::from_iterator(d, idx.iter().map(|&i| self.offsets[i]));
            if a.determinant().abs() < 1e-10 {
                continue;
            }
            let Some(x) = a.lu().solve(&b) else { continue };
            let x: Vec<f64> = x.iter().copied().collect();
            if self.feasible(&x)
                && !out
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() < SAME_TOL))
            {
                out.push(x);
            }
        }
        out
    }

    /// Drops half-spaces whose boundary misses every vertex.
    pub fn prune(&mut self) {
        let verts = self.vertices();
        let keep: Vec<bool> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| verts.iter().any(|v| (dot(a, v) - b).abs() < 1e-9))
            .collect();
        let mut i = 0;
        self.normals.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        let mut j = 0;
        self.offsets.retain(|_| {
            j += 1;
            keep[j - 1]
        });
    }

    /// Intersects with `p + K` for `K = {⟨x, n_i⟩ ≥ −ρ}`.
    pub fn cut_by_translate(&mut self, p: &[f64], normals: &[Vec<f64>], rho: f64) {
        for n in normals {
            self.push(n.clone(), dot(p, n) - rho);
        }
        self.prune();
    }
}

/// Width of a vertex set in direction `n`.
pub fn width(verts: &[Vec<f64>], n: &[f64]) -> f64 {
    let vals: Vec<f64> = verts.iter().map(|v| dot(v, n)).collect();
    vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - vals.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Area of a planar vertex set, ordered by angle around its centroid.
pub fn planar_area(verts: &[Vec<f64>]) -> f64 {
    let n = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = verts.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut sorted = verts.to_vec();
    sorted.sort_by(|a, b| {
        (a[1] - cy)
            .atan2(a[0] - cx)
            .total_cmp(&(b[1] - cy).atan2(b[0] - cx))
    });
    let m = sorted.len();
    0.5 * (0..m)
        .map(|i| {
            let (p, q) = (&sorted[i], &sorted[(i + 1) % m]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        .abs()
}

/// Largest distance from a point of `a` to its nearest point of `b`, both ways.
pub fn set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| {
                        p.iter()
                            .zip(q)
                            .map(|(s, t)| (s - t).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
