//! Brute-force reference implementations shared by the integration tests and
//! the acceptance runner.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsi_core::corpus::CooccurrenceTable;
use wsi_core::dive::{DiveEmbedding, DiveTrainConfig};
use wsi_core::linalg::Matrix;
use wsi_core::speccluster::{normalized_cut, spectral_cluster};

pub fn ln_sigmoid(x: f64) -> f64 {
    -(1.0 + (-x).exp()).ln()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, hi: f64) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(0.0..hi)).collect())
}

pub fn random_instance(seed: u64) -> (DiveEmbedding, CooccurrenceTable, DiveTrainConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.random_range(2..9);
    let dims = rng.random_range(1..6);
    let mut triplets = Vec::new();
    for w in 0..v as u32 {
        for c in 0..v as u32 {
            if rng.random_bool(0.5) {
                triplets.push((w, c, rng.random_range(1..20u64)));
            }
        }
    }
    if triplets.is_empty() {
        triplets.push((0, 1, 3));
    }
    let cooc = CooccurrenceTable::from_triplets(v, 2, triplets).unwrap();
    let words = (0..v).map(|i| format!("w{i}")).collect();
    let emb = DiveEmbedding::new(words, random_matrix(&mut rng, v, dims, 1.0), random_matrix(&mut rng, v, dims, 1.0));
    let cfg = DiveTrainConfig {
        dims,
        k_i: rng.random_range(0.5..3.0),
        ..Default::default()
    };
    (emb, cooc, cfg)
}

/// The objective written out literally: positive term over every (w, c), and for
/// every w the weight `k_I · Z / #(w)` times `Σ_c #(w,c) · E_{c_N ~ P_D}`.
pub fn naive_objective(emb: &DiveEmbedding, cooc: &CooccurrenceTable, cfg: &DiveTrainConfig) -> f64 {
    let v = cooc.vocab_size();
    let dot = |w: usize, c: usize| -> f64 {
        (0..cfg.dims).map(|i| emb.word_vecs[(w, i)] * emb.ctx_vecs[(c, i)]).sum()
    };
    // #(c) is the same word count as #(w), read off the table's rows
    let word_totals: Vec<f64> = (0..v)
        .map(|w| (0..v).map(|c| cooc.count(w as u32, c as u32) as f64).sum())
        .collect();
    let powered: Vec<f64> = word_totals.iter().map(|&n| n.powf(cfg.neg_exponent)).collect();
    let norm: f64 = powered.iter().sum();
    let z = word_totals.iter().sum::<f64>() / v as f64;
    let mut total = 0.0;
    for w in 0..v {
        for c in 0..v {
            let n = cooc.count(w as u32, c as u32) as f64;
            if n == 0.0 {
                continue;
            }
            let mut expectation = 0.0;
            for cn in 0..v {
                if powered[cn] > 0.0 {
                    expectation += powered[cn] / norm * ln_sigmoid(-dot(w, cn));
                }
            }
            total += n * ln_sigmoid(dot(w, c)) + cfg.k_i * z / word_totals[w] * n * expectation;
        }
    }
    total
}

pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += h;
    minus[i] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Largest relative error between `grad` and central differences (h = 1e-5) of
/// `weight · ln σ(±u·v)` over 100 random points.
pub fn worst_pair_gradient_error<G>(seed: u64, nonneg: bool, grad: G) -> f64
where
    G: Fn(&[f64], &[f64], bool, f64) -> (Vec<f64>, Vec<f64>),
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.random_range(1..12);
        let lo = if nonneg { 0.0 } else { -1.0 };
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(lo..1.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(lo..1.0)).collect();
        let positive = rng.random_bool(0.5);
        let weight = rng.random_range(0.1..5.0);
        let sign = if positive { 1.0 } else { -1.0 };
        let (gu, gv) = grad(&u, &v, positive, weight);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        for i in 0..d {
            let fd = central_difference(|x| weight * ln_sigmoid(sign * dot(x, &v)), &u, i, h);
            worst = worst.max(relative_error(gu[i], fd));
            let fd = central_difference(|x| weight * ln_sigmoid(sign * dot(&u, x)), &v, i, h);
            worst = worst.max(relative_error(gv[i], fd));
        }
    }
    worst
}

/// Complete graph with uniform(0, 1) edge weights.
pub fn uniform_graph(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(0.0..1.0);
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
    }
    a
}

pub fn planted_graph(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    // two planted groups with noisy weights, plus sparse random edges
    let group: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if group[i] == group[j] {
                rng.random_range(0.2..1.0)
            } else if rng.random_bool(0.4) {
                rng.random_range(0.0..0.6)
            } else {
                0.0
            };
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
    }
    a
}

/// Lowest normalized cut over all splits into two nonempty sides.
pub fn exhaustive_two_way(a: &Matrix) -> f64 {
    let n = a.rows();
    (1..(1u32 << (n - 1)))
        .map(|mask| {
            let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            normalized_cut(a, &labels)
        })
        .fold(f64::INFINITY, f64::min)
}

/// How many of 100 seeded graphs with 3 to 8 nodes get a two-way spectral cut
/// within 5% of the exhaustive optimum.
pub fn near_optimal_count(graph: fn(&mut ChaCha8Rng, usize) -> Matrix) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut good = 0;
    for seed in 0..100 {
        let n = rng.random_range(3..=8);
        let a = graph(&mut rng, n);
        let labels = spectral_cluster(&a, 2, seed).unwrap().labels;
        let best = exhaustive_two_way(&a);
        if normalized_cut(&a, &labels) <= best * 1.05 + 1e-12 {
            good += 1;
        }
    }
    good
}
