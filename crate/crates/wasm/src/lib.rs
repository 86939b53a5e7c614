//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The page trains a small DIVE model on the synthetic corpus, then draws the
//! ego network of any word with its nodes colored by sense cluster.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use wsi_core::corpus::{build_vocabulary, count_cooccurrences, tokenize_documents, TokenStream, TokenizerRules};
use wsi_core::dive::{train_dive, DiveEmbedding, DiveTrainConfig};
use wsi_core::egograph::{build_ego_network_for, top_words, EgoConfig, TopWords};
use wsi_core::speccluster::{normalized_cut, spectral_cluster};

fn js_err(e: wsi_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Synthetic corpus text with roughly `tokens` raw tokens.
#[wasm_bindgen(js_name = sampleCorpus)]
pub fn sample_corpus(tokens: usize, seed: u64) -> String {
    wsi_core::synth::sample_corpus(&wsi_core::synth::SampleCorpusConfig {
        tokens,
        seed,
        ..Default::default()
    })
}

#[wasm_bindgen]
pub struct Model {
    dive: DiveEmbedding,
    top: TopWords,
    n: usize,
}

#[derive(Serialize)]
struct Node {
    basis: usize,
    weight: f64,
    cluster: usize,
    words: Vec<String>,
}

#[derive(Serialize)]
struct EgoView {
    query: String,
    threshold: f64,
    nodes: Vec<Node>,
    adjacency: Vec<Vec<f64>>,
    normalized_cut: f64,
}

#[derive(Serialize)]
struct Topic {
    basis: usize,
    words: Vec<String>,
}

#[wasm_bindgen]
impl Model {
    /// Tokenizes `text` (one document per line) and trains DIVE with `dims` bases.
    #[wasm_bindgen(constructor)]
    pub fn train(text: &str, dims: usize, epochs: usize, seed: u64) -> Result<Model, JsError> {
        let docs = tokenize_documents(text.as_bytes(), &TokenizerRules::english()).map_err(js_err)?;
        let vocab = build_vocabulary(docs.iter().flatten(), 3).map_err(js_err)?;
        let stream = TokenStream::encode(&docs, &vocab);
        let cooc = count_cooccurrences(&stream, 10, vocab.len()).map_err(js_err)?;
        let cfg = DiveTrainConfig {
            dims,
            epochs,
            seed,
            ..Default::default()
        };
        let dive = train_dive(&cooc, vocab.words(), &cfg).map_err(js_err)?;
        let n = 30;
        let top = TopWords::build(&dive, n);
        Ok(Model { dive, top, n })
    }

    #[wasm_bindgen(js_name = vocabSize)]
    pub fn vocab_size(&self) -> usize {
        self.dive.vocab_size()
    }

    /// JSON list of every basis with its top `count` words.
    pub fn topics(&self, count: usize) -> String {
        let topics: Vec<Topic> = (0..self.dive.dims())
            .map(|b| Topic {
                basis: b,
                words: top_words(&self.dive, b, count)
                    .into_iter()
                    .map(|id| self.dive.word(id).to_string())
                    .collect(),
            })
            .collect();
        serde_json::to_string(&topics).expect("topics serialize")
    }

    /// JSON ego network of `word`, split into `k` clusters.
    #[wasm_bindgen(js_name = egoNetwork)]
    pub fn ego_network(&self, word: &str, k: usize, exclude_query: bool) -> Result<String, JsError> {
        let q = self
            .dive
            .id_of(word)
            .ok_or_else(|| JsError::new(&format!("'{word}' is not in the vocabulary")))?;
        let cfg = EgoConfig {
            n: self.n,
            exclude_query,
        };
        let w_q = self.dive.row(q);
        let net = build_ego_network_for(&self.dive, &self.top, word, Some(q), w_q, &cfg).map_err(js_err)?;
        let clusters = spectral_cluster(&net.adjacency, k.max(1), 1).map_err(js_err)?;
        let view = EgoView {
            query: word.to_string(),
            threshold: net.threshold,
            nodes: net
                .nodes
                .iter()
                .zip(&clusters.labels)
                .map(|(&b, &c)| Node {
                    basis: b,
                    weight: w_q[b],
                    cluster: c,
                    words: self.top.get(b, Some(q)).take(4).map(|id| self.dive.word(id).to_string()).collect(),
                })
                .collect(),
            adjacency: (0..net.len()).map(|i| net.adjacency.row(i).to_vec()).collect(),
            normalized_cut: normalized_cut(&net.adjacency, &clusters.labels),
        };
        Ok(serde_json::to_string(&view).expect("view serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ego_view_for_a_polyseme() {
        let text = sample_corpus(60_000, 3);
        let model = Model::train(&text, 24, 1, 1).unwrap();
        let json: serde_json::Value = serde_json::from_str(&model.ego_network("bank", 2, true).unwrap()).unwrap();
        let nodes = json["nodes"].as_array().unwrap();
        assert!(!nodes.is_empty());
        assert_eq!(json["adjacency"].as_array().unwrap().len(), nodes.len());
        let topics: serde_json::Value = serde_json::from_str(&model.topics(5)).unwrap();
        assert_eq!(topics.as_array().unwrap().len(), 24);
    }
}
