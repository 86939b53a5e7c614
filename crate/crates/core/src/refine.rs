//! EM refinement of sense vectors.
//!
//! E-step: every mention of a target word gets the sense whose vector is
//! closest (cosine) to the mean dense vector of the other tokens in its chunk.
//! M-step: skip-gram is retrained on the corpus with mentions rewritten to
//! `word_k`, and each sense vector becomes the vector of its token.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{TokenStream, OOV};
use crate::math::cosine;
use crate::senses::{Provenance, SenseModel};
use crate::sgns::{train_sgns_from, DenseEmbedding, SgnsConfig};
use crate::{Error, Result};

pub const SENSE_SEPARATOR: char = '_';

/// Placeholder written for out-of-vocabulary positions in tagged-corpus files.
pub const UNKNOWN_TOKEN: &str = "<unk>";

fn escape(word: &str) -> String {
    word.replace(SENSE_SEPARATOR, "__")
}

/// Token naming sense `k` of `word`, e.g. `bank_1`. A separator inside `word`
/// is doubled so the suffix stays unambiguous.
pub fn sense_token(word: &str, k: usize) -> String {
    format!("{}{SENSE_SEPARATOR}{k}", escape(word))
}

/// Inverse of [`sense_token`]; `None` if `token` carries no sense suffix.
pub fn split_sense_token(token: &str) -> Option<(String, usize)> {
    let (head, k) = token.rsplit_once(SENSE_SEPARATOR)?;
    if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) || head.is_empty() {
        return None;
    }
    let mut word = String::with_capacity(head.len());
    let mut chars = head.chars();
    while let Some(c) = chars.next() {
        if c == SENSE_SEPARATOR {
            // a lone separator cannot come from escape()
            if chars.next() != Some(SENSE_SEPARATOR) {
                return None;
            }
        }
        word.push(c);
    }
    Some((word, k.parse().ok()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    /// Ordinal of the token in the whole corpus, out-of-vocabulary slots included.
    pub position: usize,
    pub chunk: usize,
    pub offset: usize,
    /// Index into the target list.
    pub target: usize,
    pub sense: usize,
}

/// The chunked corpus plus a sense for every target mention.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseTaggedCorpus {
    pub chunks: TokenStream,
    pub targets: Vec<String>,
    /// Sorted by position.
    pub mentions: Vec<Mention>,
    /// Mentions whose chunk had no usable context; they were given sense 0.
    pub without_context: usize,
}

impl SenseTaggedCorpus {
    pub fn senses(&self) -> Vec<usize> {
        self.mentions.iter().map(|m| m.sense).collect()
    }

    /// Sense tokens with at least one mention, per target in sense order.
    fn used_sense_tokens(&self, models: &[SenseModel]) -> Vec<String> {
        let mut used: Vec<Vec<bool>> = models.iter().map(|m| vec![false; m.len()]).collect();
        for m in &self.mentions {
            used[m.target][m.sense] = true;
        }
        let mut out = Vec::new();
        for (t, flags) in used.iter().enumerate() {
            for (k, &u) in flags.iter().enumerate() {
                if u {
                    out.push(sense_token(&self.targets[t], k));
                }
            }
        }
        out
    }

    /// Vocabulary and stream for the M-step: targets are removed and their
    /// mentioned sense tokens appended.
    pub fn tagged_stream(&self, words: &[String], models: &[SenseModel]) -> (Vec<String>, TokenStream) {
        let is_target: Vec<bool> = {
            let set: std::collections::HashSet<&str> = self.targets.iter().map(String::as_str).collect();
            words.iter().map(|w| set.contains(w.as_str())).collect()
        };
        let mut new_words = Vec::with_capacity(words.len());
        let mut remap = vec![OOV; words.len()];
        for (i, w) in words.iter().enumerate() {
            if !is_target[i] {
                remap[i] = new_words.len() as u32;
                new_words.push(w.clone());
            }
        }
        let mut sense_ids = HashMap::new();
        for tok in self.used_sense_tokens(models) {
            sense_ids.insert(tok.clone(), new_words.len() as u32);
            new_words.push(tok);
        }
        let mut docs: Vec<Vec<u32>> = self
            .chunks
            .docs
            .iter()
            .map(|d| d.iter().map(|&t| if t == OOV { OOV } else { remap[t as usize] }).collect())
            .collect();
        for m in &self.mentions {
            docs[m.chunk][m.offset] = sense_ids[&sense_token(&self.targets[m.target], m.sense)];
        }
        (new_words, TokenStream::new(docs))
    }

    /// One chunk per line, tokens separated by spaces, mentions as `word_k`.
    pub fn to_text(&self, words: &[String]) -> String {
        let mut tagged: HashMap<(usize, usize), String> = HashMap::new();
        for m in &self.mentions {
            tagged.insert((m.chunk, m.offset), sense_token(&self.targets[m.target], m.sense));
        }
        let mut out = String::new();
        for (c, doc) in self.chunks.docs.iter().enumerate() {
            let line: Vec<&str> = doc
                .iter()
                .enumerate()
                .map(|(o, &t)| match tagged.get(&(c, o)) {
                    Some(s) => s.as_str(),
                    None if t == OOV => UNKNOWN_TOKEN,
                    None => words[t as usize].as_str(),
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, words: &[String]) -> Result<()> {
        std::fs::write(path, self.to_text(words)).map_err(|e| Error::io(path, e))
    }
}

/// Maps every vocabulary id to its row in `dense`, if any.
fn dense_rows(words: &[String], dense: &DenseEmbedding) -> Vec<Option<u32>> {
    words.iter().map(|w| dense.id_of(w)).collect()
}

fn best_sense(model: &SenseModel, context: &[f64]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in model.vectors().enumerate() {
        let c = cosine(v, context);
        if c > best.1 {
            best = (k, c);
        }
    }
    best.0
}

/// E-step over an already chunked stream. Targets are the words of `models`;
/// targets missing from `words` have no mentions.
pub fn assign_senses(
    chunks: &TokenStream,
    words: &[String],
    models: &[SenseModel],
    dense: &DenseEmbedding,
) -> Result<SenseTaggedCorpus> {
    if let Some(m) = models.iter().find(|m| m.is_empty()) {
        return Err(Error::NoSenses(m.word.clone()));
    }
    let mut target_of: Vec<Option<usize>> = vec![None; words.len()];
    for (t, m) in models.iter().enumerate() {
        if let Some(i) = words.iter().position(|w| *w == m.word) {
            target_of[i] = Some(t);
        } else {
            log::warn!("target '{}' is not in the vocabulary", m.word);
        }
    }
    let rows = dense_rows(words, dense);
    let d = dense.dims();
    let mut mentions = Vec::new();
    let mut without_context = 0;
    let mut position = 0;
    let mut ctx = vec![0.0; d];
    for (c, doc) in chunks.docs.iter().enumerate() {
        for (o, &tok) in doc.iter().enumerate() {
            let target = (tok != OOV).then(|| target_of[tok as usize]).flatten();
            if let Some(t) = target {
                ctx.iter_mut().for_each(|x| *x = 0.0);
                let mut n = 0usize;
                for (j, &other) in doc.iter().enumerate() {
                    if j == o || other == OOV {
                        continue;
                    }
                    if let Some(r) = rows[other as usize] {
                        for (x, y) in ctx.iter_mut().zip(dense.word_vecs.row(r as usize)) {
                            *x += y;
                        }
                        n += 1;
                    }
                }
                let sense = if n == 0 {
                    without_context += 1;
                    0
                } else {
                    best_sense(&models[t], &ctx)
                };
                mentions.push(Mention {
                    position: position + o,
                    chunk: c,
                    offset: o,
                    target: t,
                    sense,
                });
            }
        }
        position += doc.len();
    }
    if without_context > 0 {
        log::info!("{without_context} mentions had no usable context and were given sense 0");
    }
    Ok(SenseTaggedCorpus {
        chunks: chunks.clone(),
        targets: models.iter().map(|m| m.word.clone()).collect(),
        mentions,
        without_context,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    pub sentence_len: usize,
    pub iterations: usize,
    /// Initialize each M-step from the previous embedding instead of from scratch.
    pub warm_start: bool,
    pub sgns: SgnsConfig,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            sentence_len: 20,
            iterations: 3,
            warm_start: false,
            sgns: SgnsConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub models: Vec<SenseModel>,
    /// The embedding of the last M-step (the input embedding if no iteration ran).
    pub dense: DenseEmbedding,
    pub tagged: SenseTaggedCorpus,
    /// Sense of every mention after each E-step; the first entry uses the
    /// initial models, the last one the final models.
    pub history: Vec<Vec<usize>>,
}

impl RefineOutcome {
    /// Fraction of mentions whose sense changed between consecutive E-steps.
    pub fn churn(&self) -> Vec<f64> {
        self.history
            .windows(2)
            .map(|w| {
                let changed = w[0].iter().zip(&w[1]).filter(|(a, b)| a != b).count();
                changed as f64 / w[0].len().max(1) as f64
            })
            .collect()
    }
}

/// Alternates E- and M-steps `iterations` times, then runs a final E-step.
/// `stream` is the unchunked corpus over `words`.
pub fn em_refine(
    stream: &TokenStream,
    words: &[String],
    models: &[SenseModel],
    dense: &DenseEmbedding,
    cfg: &RefineConfig,
) -> Result<RefineOutcome> {
    if cfg.sentence_len == 0 {
        return Err(Error::Config("sentence_len must be positive".into()));
    }
    let chunks = stream.chunked(cfg.sentence_len);
    let mut models = models.to_vec();
    let mut dense = dense.clone();
    let mut tagged = assign_senses(&chunks, words, &models, &dense)?;
    let mut history = vec![tagged.senses()];
    for it in 0..cfg.iterations {
        let (tagged_words, tagged_stream) = tagged.tagged_stream(words, &models);
        let warm = cfg.warm_start.then_some(&dense);
        let mut sgns = cfg.sgns.clone();
        sgns.seed = crate::math::derive_seed(cfg.sgns.seed, it as u64);
        dense = train_sgns_from(&tagged_stream, &tagged_words, &sgns, warm)?;
        for m in models.iter_mut() {
            m.provenance = Provenance::Refined;
            for (k, s) in m.senses.iter_mut().enumerate() {
                match dense.vector(&sense_token(&m.word, k)) {
                    Some(v) => {
                        s.vector = v.to_vec();
                        s.stale = false;
                    }
                    None => s.stale = true,
                }
            }
        }
        tagged = assign_senses(&chunks, words, &models, &dense)?;
        history.push(tagged.senses());
        log::info!("refine iteration {}/{} done", it + 1, cfg.iterations);
    }
    Ok(RefineOutcome {
        models,
        dense,
        tagged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::senses::Sense;

    fn model(word: &str, vecs: &[Vec<f64>]) -> SenseModel {
        SenseModel {
            word: word.into(),
            senses: vecs
                .iter()
                .enumerate()
                .map(|(id, v)| Sense {
                    id,
                    bases: vec![],
                    vector: v.clone(),
                    stale: false,
                })
                .collect(),
            provenance: Provenance::Initial,
        }
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sense_tokens_round_trip() {
        assert_eq!(sense_token("bank", 1), "bank_1");
        assert_eq!(split_sense_token("bank_1"), Some(("bank".into(), 1)));
        assert_eq!(sense_token("a_b", 0), "a__b_0");
        assert_eq!(split_sense_token("a__b_0"), Some(("a_b".into(), 0)));
        assert_eq!(split_sense_token("bank"), None);
        assert_eq!(split_sense_token("a_b_0"), None);
        assert_eq!(split_sense_token("bank_x"), None);
    }

    #[test]
    fn nearest_sense_wins() {
        let words = strings(&["q", "c"]);
        let dense = DenseEmbedding::from_word_vecs(words.clone(), Matrix::from_rows(&[vec![0.0, 0.0], vec![0.9, 0.1]]));
        let models = vec![model("q", &[vec![1.0, 0.0], vec![0.0, 1.0]])];
        let chunks = TokenStream::new(vec![vec![0, 1]]);
        let t = assign_senses(&chunks, &words, &models, &dense).unwrap();
        assert_eq!(t.senses(), vec![0]);
        let flipped = vec![model("q", &[vec![0.0, 1.0], vec![1.0, 0.0]])];
        assert_eq!(assign_senses(&chunks, &words, &flipped, &dense).unwrap().senses(), vec![1]);
    }

    #[test]
    fn ties_and_missing_context_give_sense_zero() {
        let words = strings(&["q", "c"]);
        let dense = DenseEmbedding::from_word_vecs(words.clone(), Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]));
        let models = vec![model("q", &[vec![1.0, 0.0], vec![0.0, 1.0]])];
        let t = assign_senses(&TokenStream::new(vec![vec![0, 1], vec![0, OOV]]), &words, &models, &dense).unwrap();
        assert_eq!(t.senses(), vec![0, 0]);
        assert_eq!(t.without_context, 1);
        assert_eq!(t.mentions[1].position, 2);
    }

    #[test]
    fn single_sense_words_always_get_zero() {
        let words = strings(&["q", "a", "b"]);
        let dense = DenseEmbedding::from_word_vecs(
            words.clone(),
            Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 0.3]]),
        );
        let models = vec![model("q", &[vec![0.2, 0.7]])];
        let chunks = TokenStream::new(vec![vec![1, 0, 2], vec![0, 1], vec![2, 2, 0]]);
        assert_eq!(assign_senses(&chunks, &words, &models, &dense).unwrap().senses(), vec![0, 0, 0]);
    }

    #[test]
    fn tagged_stream_replaces_targets() {
        let words = strings(&["x", "q", "y"]);
        let dense = DenseEmbedding::from_word_vecs(
            words.clone(),
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]),
        );
        let models = vec![model("q", &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]])];
        let chunks = TokenStream::new(vec![vec![0, 1], vec![1, 2, OOV]]);
        let t = assign_senses(&chunks, &words, &models, &dense).unwrap();
        assert_eq!(t.senses(), vec![0, 1]);
        let (vocab, stream) = t.tagged_stream(&words, &models);
        assert_eq!(vocab, strings(&["x", "y", "q_0", "q_1"]));
        assert_eq!(stream.docs, vec![vec![0, 2], vec![3, 1, OOV]]);
        assert_eq!(t.to_text(&words), "x q_0\nq_1 y <unk>\n");
    }

    #[test]
    fn zero_iterations_return_inputs() {
        let words = strings(&["x", "q", "y"]);
        let dense = DenseEmbedding::from_word_vecs(
            words.clone(),
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]),
        );
        let models = vec![model("q", &[vec![1.0, 0.0], vec![0.0, 1.0]])];
        let stream = TokenStream::new(vec![vec![0, 1, 2, 0, 1]]);
        let cfg = RefineConfig {
            iterations: 0,
            ..Default::default()
        };
        let out = em_refine(&stream, &words, &models, &dense, &cfg).unwrap();
        assert_eq!(out.models, models);
        assert_eq!(out.dense, dense);
        assert_eq!(out.history.len(), 1);
        assert!(out.churn().is_empty());
    }
}
