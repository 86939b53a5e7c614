//! Skip-gram with negative sampling over documents of word ids.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng as _;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenStream, OOV};
use crate::dive::{pair_coefficient, PairGradient};
use crate::hogwild::SharedMatrix;
use crate::linalg::Matrix;
use crate::math::{derive_seed, dot, seeded_rng};
use crate::{embfile, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsConfig {
    pub dims: usize,
    /// Maximum distance to a context word; the effective window is drawn per position.
    pub window: usize,
    pub negatives: usize,
    pub neg_exponent: f64,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dims: 300,
            window: 5,
            negatives: 5,
            neg_exponent: 0.75,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            seed: 1,
            workers: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("sgns: {m}")));
        if self.dims == 0 || self.window == 0 || self.negatives == 0 || self.workers == 0 {
            return bad("dims, window, negatives and workers must be positive");
        }
        if !(self.lr_start > 0.0 && self.lr_end > 0.0) {
            return bad("learning rates must be positive");
        }
        if !(0.0..=1.0).contains(&self.neg_exponent) {
            return bad("neg_exponent must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Real-valued word and context matrices over a (possibly sense-split) vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseEmbedding {
    words: Vec<String>,
    index: HashMap<String, u32>,
    pub word_vecs: Matrix,
    pub ctx_vecs: Matrix,
}

impl DenseEmbedding {
    pub fn new(words: Vec<String>, word_vecs: Matrix, ctx_vecs: Matrix) -> Self {
        assert_eq!(words.len(), word_vecs.rows());
        assert_eq!(word_vecs.rows(), ctx_vecs.rows());
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        DenseEmbedding {
            words,
            index,
            word_vecs,
            ctx_vecs,
        }
    }

    pub fn from_word_vecs(words: Vec<String>, word_vecs: Matrix) -> Self {
        let ctx = Matrix::zeros(word_vecs.rows(), word_vecs.cols());
        Self::new(words, word_vecs, ctx)
    }

    pub fn dims(&self) -> usize {
        self.word_vecs.cols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.id_of(word).map(|i| self.word_vecs.row(i as usize))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        embfile::write_embedding(path, &self.words, &self.word_vecs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (words, vecs) = embfile::read_embedding(path)?;
        if let Some(i) = vecs.as_slice().iter().position(|x| !x.is_finite()) {
            return Err(Error::schema(path, i / vecs.cols().max(1) + 2, "non-finite entry"));
        }
        Ok(Self::from_word_vecs(words, vecs))
    }
}

/// Gradient of `weight · log σ(±u·v)` with respect to both vectors.
pub fn pair_gradient(u: &[f64], v: &[f64], positive: bool, weight: f64) -> PairGradient {
    let g = pair_coefficient(dot(u, v), positive, weight);
    PairGradient {
        word: v.iter().map(|x| g * x).collect(),
        context: u.iter().map(|x| g * x).collect(),
    }
}

/// Arithmetic mean of the word vectors of the in-vocabulary tokens.
pub fn context_embedding<S: AsRef<str>>(tokens: &[S], emb: &DenseEmbedding) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; emb.dims()];
    let mut n = 0usize;
    for t in tokens {
        if let Some(v) = emb.vector(t.as_ref()) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyContext);
    }
    let inv = 1.0 / n as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn run_worker(
    words: &SharedMatrix,
    ctxs: &SharedMatrix,
    docs: &[Vec<u32>],
    negatives: &WeightedAliasIndex<f64>,
    cfg: &SgnsConfig,
    seed: u64,
    done_before: u64,
    total: u64,
) -> u64 {
    let d = cfg.dims;
    let mut rng = seeded_rng(seed);
    let mut wbuf = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut cbuf = vec![0.0; d];
    let span = cfg.lr_start - cfg.lr_end;
    let mut seen = 0u64;
    for doc in docs {
        for (i, &w) in doc.iter().enumerate() {
            seen += 1;
            if w == OOV {
                continue;
            }
            let progress = (done_before + seen) as f64 / total as f64;
            let lr = (cfg.lr_start - span * progress).max(cfg.lr_end);
            let reach = cfg.window - rng.random_range(0..cfg.window);
            let lo = i.saturating_sub(reach);
            let hi = (i + reach + 1).min(doc.len());
            for (j, &c) in doc.iter().enumerate().take(hi).skip(lo) {
                if j == i || c == OOV {
                    continue;
                }
                let c = c as usize;
                words.load_row(c, &mut wbuf);
                grad.iter_mut().for_each(|g| *g = 0.0);
                let mut step = |target: usize, positive: bool, grad: &mut [f64]| {
                    ctxs.load_row(target, &mut cbuf);
                    let g = pair_coefficient(dot(&wbuf, &cbuf), positive, 1.0);
                    for k in 0..d {
                        grad[k] += g * cbuf[k];
                        cbuf[k] += lr * g * wbuf[k];
                    }
                    ctxs.store_row(target, &cbuf);
                };
                step(w as usize, true, &mut grad);
                for _ in 0..cfg.negatives {
                    let neg = negatives.sample(&mut rng);
                    if neg == w as usize {
                        continue;
                    }
                    step(neg, false, &mut grad);
                }
                for k in 0..d {
                    wbuf[k] += lr * grad[k];
                }
                words.store_row(c, &wbuf);
            }
        }
    }
    seen
}

/// Trains skip-gram with negative sampling from a fresh initialization.
pub fn train_sgns(stream: &TokenStream, words: &[String], cfg: &SgnsConfig) -> Result<DenseEmbedding> {
    train_sgns_from(stream, words, cfg, None)
}

/// Trains skip-gram; rows of `warm` whose word also appears in `words` seed the
/// initialization.
pub fn train_sgns_from(
    stream: &TokenStream,
    words: &[String],
    cfg: &SgnsConfig,
    warm: Option<&DenseEmbedding>,
) -> Result<DenseEmbedding> {
    cfg.validate()?;
    if stream.is_empty() {
        return Err(Error::EmptyInput("token stream"));
    }
    let v = words.len();
    if let Some(&bad) = stream.docs.iter().flatten().find(|&&t| t != OOV && t as usize >= v) {
        return Err(Error::ContractViolation(format!("token id {bad} outside vocabulary")));
    }
    let d = cfg.dims;
    let mut rng = seeded_rng(derive_seed(cfg.seed, 0x2001));
    let half = 0.5 / d as f64;
    let mut w0 = Matrix::from_vec(v, d, (0..v * d).map(|_| rng.random_range(-half..half)).collect());
    let mut c0 = Matrix::zeros(v, d);
    if let Some(warm) = warm.filter(|e| e.dims() == d) {
        for (i, word) in words.iter().enumerate() {
            if let Some(j) = warm.id_of(word) {
                w0.row_mut(i).copy_from_slice(warm.word_vecs.row(j as usize));
                c0.row_mut(i).copy_from_slice(warm.ctx_vecs.row(j as usize));
            }
        }
    }
    if cfg.epochs == 0 {
        return Ok(DenseEmbedding::new(words.to_vec(), w0, c0));
    }

    let counts = stream.counts(v);
    let weights: Vec<f64> = counts.iter().map(|&n| (n as f64).powf(cfg.neg_exponent) * f64::from(n > 0)).collect();
    let negatives = WeightedAliasIndex::new(weights)
        .map_err(|e| Error::Config(format!("cannot sample negatives: {e}")))?;
    let word_m = SharedMatrix::new(w0);
    let ctx_m = SharedMatrix::new(c0);
    let per_epoch = stream.len() as u64;
    let total = per_epoch * cfg.epochs as u64;

    for epoch in 0..cfg.epochs {
        let base = per_epoch * epoch as u64;
        if cfg.workers == 1 {
            let seed = derive_seed(cfg.seed, epoch as u64);
            run_worker(&word_m, &ctx_m, &stream.docs, &negatives, cfg, seed, base, total);
        } else {
            let per = stream.docs.len().div_ceil(cfg.workers).max(1);
            std::thread::scope(|s| {
                let mut offset = base;
                for (k, chunk) in stream.docs.chunks(per).enumerate() {
                    let seed = derive_seed(cfg.seed, (epoch * cfg.workers + k) as u64);
                    let len: u64 = chunk.iter().map(|d| d.len() as u64).sum();
                    let start = offset;
                    offset += len;
                    let (wm, cm, ng) = (&word_m, &ctx_m, &negatives);
                    s.spawn(move || run_worker(wm, cm, chunk, ng, cfg, seed, start, total));
                }
            });
        }
        if !word_m.all_finite() || !ctx_m.all_finite() {
            return Err(Error::Diverged { epoch: epoch + 1 });
        }
        log::debug!("sgns epoch {}/{} done", epoch + 1, cfg.epochs);
    }
    Ok(DenseEmbedding::new(words.to_vec(), word_m.into_matrix(), ctx_m.into_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb() -> DenseEmbedding {
        let words = vec!["u".to_string(), "v".to_string()];
        DenseEmbedding::from_word_vecs(words, Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -4.0]]))
    }

    #[test]
    fn context_of_one_word_is_its_vector() {
        assert_eq!(context_embedding(&["u"], &emb()).unwrap(), vec![1.0, 2.0]);
        assert_eq!(context_embedding(&["u", "v", "zzz"], &emb()).unwrap(), vec![2.0, -1.0]);
    }

    #[test]
    fn all_oov_context_is_an_error() {
        assert!(matches!(context_embedding(&["x", "y"], &emb()), Err(Error::EmptyContext)));
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let stream = TokenStream::new(vec![vec![0, 1, 0, 1]]);
        let words = vec!["a".to_string(), "b".to_string()];
        let cfg = SgnsConfig {
            dims: 8,
            epochs: 0,
            ..Default::default()
        };
        let e = train_sgns(&stream, &words, &cfg).unwrap();
        assert!(e.word_vecs.as_slice().iter().all(|x| x.abs() <= 0.5 / 8.0));
        assert!(e.ctx_vecs.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(e, train_sgns(&stream, &words, &cfg).unwrap());
    }
}
