//! Per-query ego networks over DIVE basis indexes.
//!
//! Nodes are the bases where the query's DIVE value exceeds `T`, 1% of the mean
//! nonzero value of its row. Each basis `b_i` gets a query-dependent feature
//! vector built from the top-`n` words of every basis `b_j`, weighted by
//! `w_q[b_j]`; edges carry the cosine of two features times
//! `ln(min(w_q[b_i], w_q[b_j]) / T)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dive::DiveEmbedding;
use crate::linalg::Matrix;
use crate::math::cosine;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EgoConfig {
    /// Top words per basis used as feature slots.
    pub n: usize,
    /// Drop the query word from every top-word list.
    pub exclude_query: bool,
}

impl Default for EgoConfig {
    fn default() -> Self {
        EgoConfig {
            n: 100,
            exclude_query: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevantBases {
    pub nodes: Vec<usize>,
    pub threshold: f64,
}

/// Bases `b` with `w_q[b] > T`, where `T` is 1% of the mean nonzero entry of `w_q`.
/// `None` when the row is all zero.
pub fn relevant_bases_of(w_q: &[f64]) -> Option<RelevantBases> {
    let nonzero: Vec<f64> = w_q.iter().copied().filter(|&x| x > 0.0).collect();
    if nonzero.is_empty() {
        return None;
    }
    let threshold = 0.01 * nonzero.iter().sum::<f64>() / nonzero.len() as f64;
    let nodes = w_q
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > threshold)
        .map(|(b, _)| b)
        .collect();
    Some(RelevantBases { nodes, threshold })
}

pub fn relevant_bases(dive: &DiveEmbedding, q: u32) -> Result<RelevantBases> {
    relevant_bases_of(dive.row(q)).ok_or_else(|| Error::NoSenses(dive.word(q).to_string()))
}

/// The `n` words with the largest value in column `b`, descending, ties by id.
pub fn top_words(dive: &DiveEmbedding, b: usize, n: usize) -> Vec<u32> {
    let mut ids: Vec<u32> = (0..dive.vocab_size() as u32).collect();
    let col = |w: u32| dive.word_vecs[(w as usize, b)];
    let order = |a: &u32, c: &u32| col(*c).total_cmp(&col(*a)).then(a.cmp(c));
    let n = n.min(ids.len());
    if n < ids.len() && n > 0 {
        ids.select_nth_unstable_by(n - 1, order);
        ids.truncate(n);
    }
    ids.sort_by(order);
    ids.truncate(n);
    ids
}

/// Top-word lists for every basis, kept one longer than `n` so a query word can
/// be excluded without recomputation.
#[derive(Debug, Clone)]
pub struct TopWords {
    n: usize,
    lists: Vec<Vec<u32>>,
}

impl TopWords {
    pub fn build(dive: &DiveEmbedding, n: usize) -> Self {
        let lists = (0..dive.dims()).map(|b| top_words(dive, b, n + 1)).collect();
        TopWords { n, lists }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `B_b(n)`, optionally without `exclude`.
    pub fn get(&self, b: usize, exclude: Option<u32>) -> impl Iterator<Item = u32> + '_ {
        self.lists[b]
            .iter()
            .copied()
            .filter(move |&w| Some(w) != exclude)
            .take(self.n)
    }
}

/// `f_(b_i,q)`: for every basis `j`, the values `w[b_i] · w_q[b_j]` of the words in
/// `B_j(n)`, concatenated in basis order. All features of one query share slots.
pub fn basis_feature(dive: &DiveEmbedding, top: &TopWords, b_i: usize, w_q: &[f64], exclude: Option<u32>) -> Vec<f64> {
    let mut f = Vec::with_capacity(top.n() * dive.dims());
    for (j, &weight) in w_q.iter().enumerate() {
        let start = f.len();
        for w in top.get(j, exclude) {
            f.push(dive.word_vecs[(w as usize, b_i)] * weight);
        }
        // short lists (tiny vocabularies) are zero-padded to n slots
        f.resize(start + top.n(), 0.0);
    }
    f
}

/// `cos(f_i, f_j) · ln(min(w_i, w_j) / T)`; zero if either feature is all zero.
pub fn basis_similarity(f_i: &[f64], f_j: &[f64], w_i: f64, w_j: f64, threshold: f64) -> f64 {
    let cos = cosine(f_i, f_j);
    if cos == 0.0 {
        return 0.0;
    }
    cos * (w_i.min(w_j) / threshold).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgoNetwork {
    pub query: String,
    pub threshold: f64,
    /// Basis indexes, ascending.
    pub nodes: Vec<usize>,
    /// Symmetric similarities between nodes; the diagonal is zero.
    pub adjacency: Matrix,
}

#[derive(Serialize, Deserialize)]
struct EgoDump {
    query: String,
    #[serde(rename = "T")]
    threshold: f64,
    nodes: Vec<usize>,
    adjacency: Vec<Vec<f64>>,
}

impl EgoNetwork {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.nodes.len();
        let dump = EgoDump {
            query: self.query.clone(),
            threshold: self.threshold,
            nodes: self.nodes.clone(),
            adjacency: (0..n).map(|i| self.adjacency.row(i).to_vec()).collect(),
        };
        serde_json::to_value(dump).expect("ego network serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let dump: EgoDump = serde_json::from_value(value).map_err(|e| Error::Json {
            path: "<ego network>".into(),
            source: e,
        })?;
        let n = dump.nodes.len();
        if dump.adjacency.len() != n || dump.adjacency.iter().any(|r| r.len() != n) {
            return Err(Error::ContractViolation("adjacency shape does not match nodes".into()));
        }
        Ok(EgoNetwork {
            query: dump.query,
            threshold: dump.threshold,
            nodes: dump.nodes,
            adjacency: Matrix::from_rows(&dump.adjacency),
        })
    }

    pub fn write_json(networks: &[EgoNetwork], path: &Path) -> Result<()> {
        let all: Vec<serde_json::Value> = networks.iter().map(EgoNetwork::to_json).collect();
        let text = serde_json::to_string_pretty(&all).expect("json");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Builds the ego network for `query` whose DIVE weights are `w_q`.
///
/// `w_q` is passed separately from the matrix so callers can query with a
/// modified row; `query_id` is only used for `exclude_query`.
pub fn build_ego_network_for(
    dive: &DiveEmbedding,
    top: &TopWords,
    query: &str,
    query_id: Option<u32>,
    w_q: &[f64],
    cfg: &EgoConfig,
) -> Result<EgoNetwork> {
    let rel = relevant_bases_of(w_q).ok_or_else(|| Error::NoSenses(query.to_string()))?;
    let exclude = if cfg.exclude_query { query_id } else { None };
    let features: Vec<Vec<f64>> = rel
        .nodes
        .iter()
        .map(|&b| basis_feature(dive, top, b, w_q, exclude))
        .collect();
    let n = rel.nodes.len();
    let mut adjacency = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = basis_similarity(
                &features[i],
                &features[j],
                w_q[rel.nodes[i]],
                w_q[rel.nodes[j]],
                rel.threshold,
            );
            adjacency[(i, j)] = s;
            adjacency[(j, i)] = s;
        }
    }
    Ok(EgoNetwork {
        query: query.to_string(),
        threshold: rel.threshold,
        nodes: rel.nodes,
        adjacency,
    })
}

pub fn build_ego_network(dive: &DiveEmbedding, q: u32, cfg: &EgoConfig) -> Result<EgoNetwork> {
    let top = TopWords::build(dive, cfg.n);
    build_ego_network_for(dive, &top, dive.word(q), Some(q), dive.row(q), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dive(rows: &[Vec<f64>]) -> DiveEmbedding {
        let words = (0..rows.len()).map(|i| format!("w{i}")).collect();
        DiveEmbedding::from_word_vecs(words, Matrix::from_rows(rows))
    }

    #[test]
    fn threshold_example() {
        let r = relevant_bases_of(&[10.0, 0.05, 0.0, 5.0]).unwrap();
        let mean = (10.0 + 0.05 + 5.0) / 3.0;
        assert!((r.threshold - 0.01 * mean).abs() < 1e-15);
        assert!((r.threshold - 0.050167).abs() < 1e-6);
        assert_eq!(r.nodes, vec![0, 3]);
    }

    #[test]
    fn single_nonzero_entry() {
        let r = relevant_bases_of(&[0.0, 0.0, 4.0]).unwrap();
        assert!((r.threshold - 0.04).abs() < 1e-15);
        assert_eq!(r.nodes, vec![2]);
        assert!(relevant_bases_of(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn all_zero_row_has_no_senses() {
        let d = dive(&[vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert!(matches!(relevant_bases(&d, 0), Err(Error::NoSenses(_))));
        assert!(matches!(build_ego_network(&d, 0, &EgoConfig::default()), Err(Error::NoSenses(_))));
    }

    #[test]
    fn top_words_ranking() {
        let d = dive(&[vec![0.5, 0.0], vec![2.0, 0.0], vec![0.5, 3.0], vec![1.0, 0.0]]);
        assert_eq!(top_words(&d, 0, 4), vec![1, 3, 0, 2]);
        assert_eq!(top_words(&d, 0, 2), vec![1, 3]);
        assert_eq!(top_words(&d, 1, 1), vec![2]);
    }

    #[test]
    fn hand_computed_feature() {
        // rows: words; columns: bases. n = 1 so B_0 = {w1}, B_1 = {w2}.
        let d = dive(&[vec![0.1, 0.2], vec![3.0, 0.5], vec![0.4, 2.0]]);
        let top = TopWords::build(&d, 1);
        let w_q = [2.0, 0.5];
        // f_(b0) = [w1[0]*wq[0], w2[0]*wq[1]] = [6.0, 0.2]
        assert_eq!(basis_feature(&d, &top, 0, &w_q, None), vec![6.0, 0.2]);
        // f_(b1) = [w1[1]*wq[0], w2[1]*wq[1]] = [1.0, 1.0]
        assert_eq!(basis_feature(&d, &top, 1, &w_q, None), vec![1.0, 1.0]);
    }

    #[test]
    fn only_weighted_block_is_nonzero() {
        let d = dive(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let top = TopWords::build(&d, 2);
        let f = basis_feature(&d, &top, 1, &[0.0, 1.5, 0.0], None);
        assert_eq!(f.len(), 6);
        assert!(f[..2].iter().chain(&f[4..]).all(|&x| x == 0.0));
        assert!(f[2..4].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn feature_scales_linearly() {
        let d = dive(&[vec![1.0, 2.0, 3.0], vec![4.0, 0.5, 6.0], vec![0.3, 0.7, 0.1]]);
        let top = TopWords::build(&d, 2);
        let w_q = [0.3, 1.1, 2.0];
        let scaled: Vec<f64> = w_q.iter().map(|x| x * 7.0).collect();
        let a = basis_feature(&d, &top, 2, &w_q, None);
        let b = basis_feature(&d, &top, 2, &scaled, None);
        for (x, y) in a.iter().zip(&b) {
            assert!((x * 7.0 - y).abs() <= 1e-12 * y.abs());
        }
    }

    #[test]
    fn similarity_examples() {
        let f = [1.0, 2.0, 0.5];
        let t = 0.3;
        let s = basis_similarity(&f, &f, std::f64::consts::E * t, 10.0, t);
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(basis_similarity(&[1.0, 0.0], &[0.0, 1.0], 5.0, 5.0, 0.1), 0.0);
        assert_eq!(basis_similarity(&[0.0, 0.0], &[0.0, 1.0], 5.0, 5.0, 0.1), 0.0);
        let near = basis_similarity(&f, &f, t * (1.0 + 1e-9), 3.0, t);
        assert!(near >= 0.0 && near < 1e-8);
    }

    #[test]
    fn adjacency_is_recomputable() {
        let d = dive(&[
            vec![1.0, 0.0, 2.0, 0.3],
            vec![0.2, 1.5, 0.0, 0.9],
            vec![0.7, 0.7, 0.1, 0.0],
            vec![0.0, 0.4, 1.2, 2.2],
        ]);
        let cfg = EgoConfig { n: 2, exclude_query: false };
        let net = build_ego_network(&d, 2, &cfg).unwrap();
        let top = TopWords::build(&d, 2);
        let wq = d.row(2);
        for (a, &bi) in net.nodes.iter().enumerate() {
            assert_eq!(net.adjacency[(a, a)], 0.0);
            for (b, &bj) in net.nodes.iter().enumerate().filter(|p| p.0 != a) {
                let fi = basis_feature(&d, &top, bi, wq, None);
                let fj = basis_feature(&d, &top, bj, wq, None);
                let s = basis_similarity(&fi, &fj, wq[bi], wq[bj], net.threshold);
                assert_eq!(net.adjacency[(a, b)], s);
                assert!(s >= 0.0);
            }
        }
        let back = EgoNetwork::from_json(net.to_json()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn excluding_the_query_changes_slots() {
        let d = dive(&[vec![5.0, 1.0], vec![1.0, 5.0], vec![2.0, 2.0]]);
        let top = TopWords::build(&d, 1);
        let with = basis_feature(&d, &top, 0, d.row(0), None);
        let without = basis_feature(&d, &top, 0, d.row(0), Some(0));
        assert_eq!(with.len(), without.len());
        assert_ne!(with, without);
    }
}
