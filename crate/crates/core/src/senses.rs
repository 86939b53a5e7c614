//! Sense embeddings from clustered DIVE bases.
//!
//! Each basis gets a topic embedding: the exp-weighted average of the dense
//! vectors of its top `m` words. A sense is the exp-weighted average of the
//! topic embeddings in one cluster of the query's ego network.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dive::DiveEmbedding;
use crate::egograph::{build_ego_network_for, top_words, EgoConfig, EgoNetwork, TopWords};
use crate::math::exp_weights;
use crate::sgns::DenseEmbedding;
use crate::speccluster::{spectral_cluster, ClusterAssignment};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TopicEmbedding {
    pub basis: usize,
    pub vec: Vec<f64>,
}

/// Exp-weighted mean of `vectors`, where `values` are first scaled to mean 1.
fn normalized_exp_average(values: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let scaled: Vec<f64> = values.iter().map(|v| v / mean).collect();
    let weights = exp_weights(&scaled);
    let mut out = vec![0.0; vectors[0].len()];
    for (w, v) in weights.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += w * x;
        }
    }
    out
}

/// Topic embedding of basis `b` over its top `m` words with a positive value.
/// Words missing from `dense` are skipped.
pub fn topic_embedding(dive: &DiveEmbedding, dense: &DenseEmbedding, b: usize, m: usize) -> Result<TopicEmbedding> {
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for id in top_words(dive, b, m) {
        let v = dive.row(id)[b];
        if v <= 0.0 {
            break;
        }
        if let Some(e) = dense.vector(dive.word(id)) {
            values.push(v);
            vectors.push(e);
        }
    }
    if values.is_empty() {
        return Err(Error::ZeroColumn(b));
    }
    Ok(TopicEmbedding {
        basis: b,
        vec: normalized_exp_average(&values, &vectors),
    })
}

/// Topic embeddings of every basis, computed once and shared across queries.
/// Bases without a usable word have no entry.
#[derive(Debug, Clone)]
pub struct TopicCache {
    topics: Vec<Option<Vec<f64>>>,
}

impl TopicCache {
    pub fn build(dive: &DiveEmbedding, dense: &DenseEmbedding, m: usize) -> Self {
        let topics = (0..dive.dims())
            .map(|b| topic_embedding(dive, dense, b, m).ok().map(|t| t.vec))
            .collect();
        TopicCache { topics }
    }

    pub fn from_topics(topics: Vec<Option<Vec<f64>>>) -> Self {
        TopicCache { topics }
    }

    pub fn get(&self, b: usize) -> Option<&[f64]> {
        self.topics.get(b).and_then(|t| t.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Initial,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseBasis {
    pub index: usize,
    /// The query's raw DIVE value on this basis.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sense {
    pub id: usize,
    pub bases: Vec<SenseBasis>,
    pub vector: Vec<f64>,
    /// Set when refinement assigned no mention to this sense, so the vector
    /// was carried over from the previous iteration.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseModel {
    pub word: String,
    pub senses: Vec<Sense>,
    #[serde(default = "initial")]
    pub provenance: Provenance,
}

fn initial() -> Provenance {
    Provenance::Initial
}

impl SenseModel {
    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.senses.iter().map(|s| s.vector.as_slice())
    }
}

/// Reads a JSON array of sense models.
pub fn read_sense_models(path: &Path) -> Result<Vec<SenseModel>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let models: Vec<SenseModel> = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    for m in &models {
        let dims = m.senses.first().map_or(0, |s| s.vector.len());
        for s in &m.senses {
            if s.vector.len() != dims || s.vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::schema(path, 0, format!("sense {} of '{}' has a bad vector", s.id, m.word)));
            }
        }
    }
    Ok(models)
}

pub fn write_sense_models(path: &Path, models: &[SenseModel]) -> Result<()> {
    let text = serde_json::to_string_pretty(models).expect("sense models serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Builds sense vectors from a clustering of the ego-network `nodes`.
///
/// `w_q` is the query's full DIVE row; its values on `nodes` are scaled to
/// mean 1 before exponentiation. Bases with no topic embedding are skipped and
/// clusters left empty are dropped.
pub fn sense_embeddings(
    word: &str,
    w_q: &[f64],
    nodes: &[usize],
    assignment: &ClusterAssignment,
    topics: &TopicCache,
) -> Result<SenseModel> {
    if nodes.len() != assignment.labels.len() {
        return Err(Error::ContractViolation("assignment does not match the ego network".into()));
    }
    let mean = nodes.iter().map(|&b| w_q[b]).sum::<f64>() / nodes.len() as f64;
    let mut senses = Vec::new();
    for (k, members) in assignment.clusters().into_iter().enumerate() {
        let usable: Vec<usize> = members
            .into_iter()
            .map(|i| nodes[i])
            .filter(|&b| topics.get(b).is_some())
            .collect();
        if usable.is_empty() {
            log::warn!("'{word}': cluster {k} has no usable basis, dropped");
            continue;
        }
        let scaled: Vec<f64> = usable.iter().map(|&b| w_q[b] / mean).collect();
        let weights = exp_weights(&scaled);
        let mut vector = vec![0.0; topics.get(usable[0]).unwrap().len()];
        for (w, &b) in weights.iter().zip(&usable) {
            for (o, x) in vector.iter_mut().zip(topics.get(b).unwrap()) {
                *o += w * x;
            }
        }
        senses.push(Sense {
            id: senses.len(),
            bases: usable.iter().map(|&b| SenseBasis { index: b, weight: w_q[b] }).collect(),
            vector,
            stale: false,
        });
    }
    if senses.is_empty() {
        return Err(Error::NoSenses(word.to_string()));
    }
    Ok(SenseModel {
        word: word.to_string(),
        senses,
        provenance: Provenance::Initial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InduceConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub exclude_query: bool,
}

impl Default for InduceConfig {
    fn default() -> Self {
        InduceConfig {
            n: 100,
            m: 1000,
            k: 2,
            seed: 1,
            exclude_query: false,
        }
    }
}

impl InduceConfig {
    pub fn ego(&self) -> EgoConfig {
        EgoConfig {
            n: self.n,
            exclude_query: self.exclude_query,
        }
    }
}

/// Ego network, its clustering and the resulting senses for one query.
#[derive(Debug, Clone)]
pub struct Induction {
    pub network: EgoNetwork,
    pub assignment: ClusterAssignment,
    pub model: SenseModel,
}

/// Runs ego network → spectral clustering → sense embeddings with the query
/// row given explicitly.
pub fn induce_for(
    dive: &DiveEmbedding,
    top: &TopWords,
    topics: &TopicCache,
    query: &str,
    w_q: &[f64],
    cfg: &InduceConfig,
) -> Result<Induction> {
    let network = build_ego_network_for(dive, top, query, dive.id_of(query), w_q, &cfg.ego())?;
    let assignment = spectral_cluster(&network.adjacency, cfg.k, cfg.seed)?;
    let model = sense_embeddings(query, w_q, &network.nodes, &assignment, topics)?;
    Ok(Induction {
        network,
        assignment,
        model,
    })
}

pub fn induce(dive: &DiveEmbedding, top: &TopWords, topics: &TopicCache, query: &str, cfg: &InduceConfig) -> Result<Induction> {
    let q = dive.id_of(query).ok_or_else(|| Error::UnknownWord(query.to_string()))?;
    induce_for(dive, top, topics, query, dive.row(q), cfg)
}

/// Up to `size` words describing a sense: candidates from the top lists of its
/// bases, ranked by their DIVE mass on those bases weighted like the sense.
pub fn sense_inventory(dive: &DiveEmbedding, sense: &Sense, exclude: &str, size: usize) -> Vec<String> {
    let values: Vec<f64> = sense.bases.iter().map(|b| b.weight).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let weights = exp_weights(&values.iter().map(|v| v / mean).collect::<Vec<_>>());
    let mut candidates: Vec<u32> = sense
        .bases
        .iter()
        .flat_map(|b| top_words(dive, b.index, size + 1))
        .filter(|&id| dive.word(id) != exclude)
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut scored: Vec<(f64, u32)> = candidates
        .into_iter()
        .map(|id| {
            let row = dive.row(id);
            let s = sense.bases.iter().zip(&weights).map(|(b, w)| w * row[b.index]).sum();
            (s, id)
        })
        .filter(|(s, _)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().take(size).map(|(_, id)| dive.word(id).to_string()).collect()
}

/// `word<TAB>sense_id<TAB>w1,w2,...` with the top-20 inventory words per sense.
pub fn write_inventory(path: &Path, dive: &DiveEmbedding, models: &[SenseModel]) -> Result<()> {
    let mut out = String::new();
    for m in models {
        for s in &m.senses {
            let words = sense_inventory(dive, s, &m.word, 20);
            out.push_str(&format!("{}\t{}\t{}\n", m.word, s.id, words.join(",")));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn words(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn topic_of_equal_values_is_plain_mean() {
        let dive = DiveEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![0.4], vec![0.4]]));
        let dense = DenseEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]));
        let t = topic_embedding(&dive, &dense, 0, 1000).unwrap();
        assert!(close(&t.vec, &[0.5, 1.5]));
    }

    #[test]
    fn topic_of_single_word_is_its_vector() {
        let dive = DiveEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![0.7], vec![0.0]]));
        let dense = DenseEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![1.0, -2.0], vec![9.0, 9.0]]));
        assert_eq!(topic_embedding(&dive, &dense, 0, 1000).unwrap().vec, vec![1.0, -2.0]);
    }

    #[test]
    fn topic_weights_follow_sigmoid_of_gap() {
        // w' = [1.5, 0.5]
        let dive = DiveEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![3.0], vec![1.0]]));
        let dense = DenseEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        let t = topic_embedding(&dive, &dense, 0, 1000).unwrap();
        assert!((t.vec[0] - 0.731_058_578_630_005).abs() < 1e-12);
        assert!((t.vec[1] - 0.268_941_421_369_995).abs() < 1e-12);
    }

    #[test]
    fn topic_skips_words_missing_from_dense_vocabulary() {
        let dive = DiveEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![3.0], vec![1.0]]));
        let dense = DenseEmbedding::from_word_vecs(vec!["w1".into()], Matrix::from_rows(&[vec![2.0, 2.0]]));
        assert_eq!(topic_embedding(&dive, &dense, 0, 1000).unwrap().vec, vec![2.0, 2.0]);
        let zero = DiveEmbedding::from_word_vecs(words(2), Matrix::from_rows(&[vec![0.0], vec![0.0]]));
        assert!(matches!(topic_embedding(&zero, &dense, 0, 10), Err(Error::ZeroColumn(0))));
    }

    fn three_topics() -> TopicCache {
        TopicCache::from_topics(vec![Some(vec![1.0, 0.0]), Some(vec![0.0, 1.0]), Some(vec![5.0, 5.0])])
    }

    #[test]
    fn hand_example_three_bases() {
        // w_q on nodes [0, 1, 2] is [0, 1, 2] · 0.3; scaled to mean 1 → [0, 1, 2].
        let w_q = [0.0, 0.3, 0.6];
        let assignment = ClusterAssignment {
            labels: vec![0, 0, 1],
            k: 2,
        };
        let m = sense_embeddings("q", &w_q, &[0, 1, 2], &assignment, &three_topics()).unwrap();
        let e = std::f64::consts::E;
        assert!(close(&m.senses[0].vector, &[1.0 / (e + 1.0), e / (e + 1.0)]));
        assert!(close(&m.senses[1].vector, &[5.0, 5.0]));
        assert_eq!(m.senses[1].bases, vec![SenseBasis { index: 2, weight: 0.6 }]);
    }

    #[test]
    fn equal_relevance_gives_unweighted_mean_and_scale_does_not_matter() {
        let assignment = ClusterAssignment { labels: vec![0, 0], k: 1 };
        let a = sense_embeddings("q", &[0.2, 0.2, 9.0], &[0, 1], &assignment, &three_topics()).unwrap();
        assert!(close(&a.senses[0].vector, &[0.5, 0.5]));
        let w_q = [0.1, 0.5, 0.3];
        let base = sense_embeddings("q", &w_q, &[0, 1, 2], &ClusterAssignment { labels: vec![0, 1, 0], k: 2 }, &three_topics()).unwrap();
        let scaled: Vec<f64> = w_q.iter().map(|x| x * 7.5).collect();
        let other = sense_embeddings("q", &scaled, &[0, 1, 2], &ClusterAssignment { labels: vec![0, 1, 0], k: 2 }, &three_topics()).unwrap();
        for (s, t) in base.senses.iter().zip(&other.senses) {
            assert!(close(&s.vector, &t.vector));
        }
    }

    #[test]
    fn clusters_without_topics_are_dropped() {
        let topics = TopicCache::from_topics(vec![Some(vec![1.0]), None]);
        let assignment = ClusterAssignment { labels: vec![0, 1], k: 2 };
        let m = sense_embeddings("q", &[1.0, 1.0], &[0, 1], &assignment, &topics).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.senses[0].id, 0);
        let none = TopicCache::from_topics(vec![None, None]);
        assert!(sense_embeddings("q", &[1.0, 1.0], &[0, 1], &assignment, &none).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = SenseModel {
            word: "bank".into(),
            senses: vec![
                Sense {
                    id: 0,
                    bases: vec![SenseBasis { index: 3, weight: 0.25 }],
                    vector: vec![0.1, -0.2],
                    stale: false,
                },
                Sense {
                    id: 1,
                    bases: vec![SenseBasis { index: 7, weight: 1.5 }],
                    vector: vec![1.0, 2.0],
                    stale: true,
                },
            ],
            provenance: Provenance::Refined,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("senses.json");
        write_sense_models(&p, std::slice::from_ref(&m)).unwrap();
        assert_eq!(read_sense_models(&p).unwrap(), vec![m]);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"word\": \"bank\"") && text.contains("\"provenance\": \"refined\""));
    }

    #[test]
    fn inventory_ranks_by_weighted_mass() {
        let dive = DiveEmbedding::from_word_vecs(
            words(4),
            Matrix::from_rows(&[vec![1.0, 1.0], vec![0.9, 0.0], vec![0.0, 0.5], vec![0.2, 0.2]]),
        );
        let sense = Sense {
            id: 0,
            bases: vec![SenseBasis { index: 0, weight: 1.0 }, SenseBasis { index: 1, weight: 1.0 }],
            vector: vec![],
            stale: false,
        };
        assert_eq!(sense_inventory(&dive, &sense, "w0", 3), vec!["w1", "w2", "w3"]);
        assert_eq!(sense_inventory(&dive, &sense, "w3", 1), vec!["w0"]);
    }
}
