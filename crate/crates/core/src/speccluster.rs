//! Spectral clustering of small weighted graphs.
//!
//! Symmetric normalized Laplacian `I − D^{-1/2} A D^{-1/2}`, eigenvectors of the
//! `k` smallest eigenvalues, row normalization, then seeded k-means with 20
//! restarts keeping the lowest inertia. The k-means labels are then polished by
//! single-node moves that lower the normalized cut.

use rand::Rng as _;

use crate::linalg::{symmetric_eigen, Matrix};
use crate::math::{derive_seed, seeded_rng, Rng};
use crate::{Error, Result};

pub const KMEANS_RESTARTS: usize = 20;
const KMEANS_MAX_ITER: usize = 300;
const ISOLATED_DEGREE: f64 = 1e-12;
const CUT_TOLERANCE: f64 = 1e-12;

/// Node → cluster labels. Labels are canonical: cluster 0 holds node 0, and each
/// further cluster id is assigned in order of its lowest node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl ClusterAssignment {
    pub fn num_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each cluster, in label order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters()];
        for (node, &l) in self.labels.iter().enumerate() {
            out[l].push(node);
        }
        out
    }
}

/// Relabels so clusters are numbered by first appearance.
pub fn canonicalize(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn validate(adjacency: &Matrix) -> Result<()> {
    let n = adjacency.rows();
    if adjacency.cols() != n {
        return Err(Error::ContractViolation("adjacency must be square".into()));
    }
    let scale = adjacency.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in 0..n {
            let a = adjacency[(i, j)];
            if !a.is_finite() || a < 0.0 {
                return Err(Error::ContractViolation(format!("adjacency[{i}][{j}] = {a}")));
            }
            if (a - adjacency[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::ContractViolation(format!("adjacency not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Row-normalized spectral embedding of the nodes, `k` coordinates each.
pub fn spectral_embedding(adjacency: &Matrix, k: usize) -> Vec<Vec<f64>> {
    let n = adjacency.rows();
    let degree: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = (0..n).filter(|&j| j != i).map(|j| adjacency[(i, j)]).sum();
            if d > 0.0 {
                d
            } else {
                ISOLATED_DEGREE
            }
        })
        .collect();
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut lap = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lap[(i, j)] = -adjacency[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
            }
        }
    }
    let eig = symmetric_eigen(&lap);
    (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|c| eig.vectors[(i, c)]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
            row
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    while centers.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| sq_dist(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut idx = d2.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if r < d {
                    idx = i;
                    break;
                }
                r -= d;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[pick].clone());
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm from a k-means++ start. Returns `(labels, inertia)`.
fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> (Vec<usize>, f64) {
    let dim = points[0].len();
    let mut centers = kmeans_pp_init(points, k, rng);
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let (c, _) = nearest(p, &centers);
            if *l != c {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            // empty clusters keep their previous center
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = points.iter().map(|p| nearest(p, &centers).1).sum();
    let labels = points.iter().map(|p| nearest(p, &centers).0).collect();
    (labels, inertia)
}

/// Best of `restarts` seeded k-means runs (lowest inertia, earliest on ties).
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> (Vec<usize>, f64) {
    assert!(!points.is_empty() && k >= 1);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts.max(1) {
        let mut rng = seeded_rng(derive_seed(seed, r as u64));
        let (labels, inertia) = kmeans_once(points, k, &mut rng);
        if best.as_ref().is_none_or(|b| inertia < b.1) {
            best = Some((labels, inertia));
        }
    }
    best.expect("at least one restart")
}

/// Partitions the nodes of `adjacency` into at most `k` clusters.
pub fn spectral_cluster(adjacency: &Matrix, k: usize, seed: u64) -> Result<ClusterAssignment> {
    if k == 0 {
        return Err(Error::ContractViolation("k must be at least 1".into()));
    }
    validate(adjacency)?;
    let n = adjacency.rows();
    if n == 0 {
        return Err(Error::ContractViolation("graph has no nodes".into()));
    }
    if n <= k {
        return Ok(ClusterAssignment {
            labels: (0..n).collect(),
            k,
        });
    }
    let points = spectral_embedding(adjacency, k);
    let (mut labels, _) = kmeans(&points, k, KMEANS_RESTARTS, seed);
    refine_cut(adjacency, &mut labels, k);
    Ok(ClusterAssignment {
        labels: canonicalize(&labels),
        k,
    })
}

/// Greedy descent on the normalized cut: repeatedly applies the single-node
/// move (never emptying a cluster) with the largest decrease, first node and
/// lowest target cluster on ties, until no move helps.
pub fn refine_cut(adjacency: &Matrix, labels: &mut [usize], k: usize) {
    let n = labels.len();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut current = normalized_cut(adjacency, labels);
    // each accepted move strictly lowers the cut, so this only bounds round-off loops
    for _ in 0..n * n * k {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            let from = labels[i];
            if sizes[from] == 1 {
                continue;
            }
            for to in (0..k).filter(|&c| c != from) {
                labels[i] = to;
                let v = normalized_cut(adjacency, labels);
                labels[i] = from;
                if v < current - CUT_TOLERANCE && best.is_none_or(|b| v < b.0) {
                    best = Some((v, i, to));
                }
            }
        }
        let Some((v, i, to)) = best else { break };
        sizes[labels[i]] -= 1;
        sizes[to] += 1;
        labels[i] = to;
        current = v;
    }
}

/// `Σ_k cut(A_k, Ā_k) / vol(A_k)`, ignoring self loops. Clusters with zero
/// volume contribute zero.
pub fn normalized_cut(adjacency: &Matrix, labels: &[usize]) -> f64 {
    let n = adjacency.rows();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut cut = vec![0.0; k];
    let mut vol = vec![0.0; k];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = adjacency[(i, j)];
            vol[labels[i]] += a;
            if labels[i] != labels[j] {
                cut[labels[i]] += a;
            }
        }
    }
    cut.iter()
        .zip(&vol)
        .map(|(&c, &v)| if v > 0.0 { c / v } else { 0.0 })
        .sum()
}
