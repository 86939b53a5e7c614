//! Distributional inclusion vector embeddings (DIVE).
//!
//! A skip-gram variant with two changes: word and context vectors are kept
//! non-negative, and the negative-sampling term of word `w` is weighted by
//! `k_I · Z / #(w)`, inversely proportional to the word's co-occurrence mass.
//! Each coordinate then behaves like a topic, and count inclusion between two
//! words is approximately preserved coordinate-wise.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng as _;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::corpus::CooccurrenceTable;
use crate::hogwild::SharedMatrix;
use crate::linalg::Matrix;
use crate::math::{derive_seed, dot, log_sigmoid, seeded_rng, sigmoid};
use crate::{embfile, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiveTrainConfig {
    /// Number of basis indexes `L`.
    pub dims: usize,
    /// Negative-term constant `k_I`.
    pub k_i: f64,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// Negative samples drawn per positive pair.
    pub negatives: usize,
    /// Exponent of the unigram negative distribution `P_D ∝ #(c)^exponent`.
    pub neg_exponent: f64,
    /// Positive pairs drawn per epoch; `None` means `Σ #(w,c)`.
    pub samples_per_epoch: Option<u64>,
    pub seed: u64,
    /// 1 gives bit-reproducible training.
    pub workers: usize,
}

impl Default for DiveTrainConfig {
    fn default() -> Self {
        DiveTrainConfig {
            dims: 100,
            k_i: 1.0,
            epochs: 3,
            lr_start: 0.025,
            lr_end: 0.0001,
            negatives: 5,
            neg_exponent: 0.75,
            samples_per_epoch: None,
            seed: 1,
            workers: 1,
        }
    }
}

impl DiveTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("dive: {m}")));
        if self.dims == 0 {
            return bad("dims must be positive");
        }
        if !(self.k_i > 0.0) {
            return bad("k_i must be positive");
        }
        if !(self.lr_start > 0.0 && self.lr_end > 0.0) {
            return bad("learning rates must be positive");
        }
        if self.negatives == 0 {
            return bad("negatives must be positive");
        }
        if !(0.0..=1.0).contains(&self.neg_exponent) {
            return bad("neg_exponent must lie in [0, 1]");
        }
        if self.samples_per_epoch == Some(0) {
            return bad("samples_per_epoch must be positive");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        Ok(())
    }
}

/// Non-negative `|V| × L` word and context matrices. Column `b` is basis index (topic) `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiveEmbedding {
    words: Vec<String>,
    index: HashMap<String, u32>,
    pub word_vecs: Matrix,
    pub ctx_vecs: Matrix,
}

impl DiveEmbedding {
    pub fn new(words: Vec<String>, word_vecs: Matrix, ctx_vecs: Matrix) -> Self {
        assert_eq!(words.len(), word_vecs.rows());
        assert_eq!(word_vecs.cols(), ctx_vecs.cols());
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        DiveEmbedding {
            words,
            index,
            word_vecs,
            ctx_vecs,
        }
    }

    /// Builds an embedding from word rows only; context vectors are zero.
    pub fn from_word_vecs(words: Vec<String>, word_vecs: Matrix) -> Self {
        let ctx = Matrix::zeros(word_vecs.rows(), word_vecs.cols());
        Self::new(words, word_vecs, ctx)
    }

    pub fn dims(&self) -> usize {
        self.word_vecs.cols()
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn id_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn row(&self, id: u32) -> &[f64] {
        self.word_vecs.row(id as usize)
    }

    pub fn min_entry(&self) -> f64 {
        self.word_vecs
            .as_slice()
            .iter()
            .chain(self.ctx_vecs.as_slice())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        embfile::write_embedding(path, &self.words, &self.word_vecs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (words, vecs) = embfile::read_embedding(path)?;
        if let Some(i) = vecs.as_slice().iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
            let line = i / vecs.cols().max(1) + 2;
            return Err(Error::schema(path, line, "DIVE entries must be finite and non-negative"));
        }
        Ok(Self::from_word_vecs(words, vecs))
    }
}

/// Gradient of one weighted `log σ(±w·c)` term with respect to both vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub word: Vec<f64>,
    pub context: Vec<f64>,
}

/// Scalar `g` with `∂/∂w = g·c` and `∂/∂c = g·w` for `weight · log σ(±w·c)`.
#[inline]
pub fn pair_coefficient(dot: f64, positive: bool, weight: f64) -> f64 {
    if positive {
        weight * sigmoid(-dot)
    } else {
        -weight * sigmoid(dot)
    }
}

/// `∂/∂w log σ(w·c) = σ(−w·c)·c` for positive pairs and
/// `∂/∂w log σ(−w·c) = −σ(w·c)·c` for negative ones, scaled by `weight`.
pub fn dive_gradient(w_row: &[f64], c_row: &[f64], is_positive: bool, weight: f64) -> PairGradient {
    let g = pair_coefficient(dot(w_row, c_row), is_positive, weight);
    PairGradient {
        word: c_row.iter().map(|x| g * x).collect(),
        context: w_row.iter().map(|x| g * x).collect(),
    }
}

/// Negative sampling distribution `P_D(c) ∝ #(c)^exponent` over contexts with `#(c) > 0`.
pub fn negative_distribution(cooc: &CooccurrenceTable, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = cooc
        .word_totals()
        .iter()
        .map(|&n| if n > 0 { (n as f64).powf(exponent) } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return raw;
    }
    raw.into_iter().map(|x| x / total).collect()
}

/// Exact DIVE objective with the expectation over `P_D` summed over the vocabulary.
///
/// Uses `Z/#(w) · Σ_c #(w,c) = Z`, so the negative part costs `O(|V|² L)`.
pub fn dive_objective(emb: &DiveEmbedding, cooc: &CooccurrenceTable, cfg: &DiveTrainConfig) -> f64 {
    let words = &emb.word_vecs;
    let ctxs = &emb.ctx_vecs;
    let mut positive = 0.0;
    for (w, c, n) in cooc.iter() {
        positive += n as f64 * log_sigmoid(dot(words.row(w as usize), ctxs.row(c as usize)));
    }
    let pd = negative_distribution(cooc, cfg.neg_exponent);
    let support: Vec<(usize, f64)> = pd.iter().copied().enumerate().filter(|p| p.1 > 0.0).collect();
    let mut negative = 0.0;
    for w in 0..cooc.vocab_size() {
        if cooc.word_total(w as u32) == 0 {
            continue;
        }
        let wr = words.row(w);
        let expectation: f64 = support
            .iter()
            .map(|&(c, p)| p * log_sigmoid(-dot(wr, ctxs.row(c))))
            .sum();
        negative += expectation;
    }
    positive + cfg.k_i * cooc.z() * negative
}

fn initial_matrix(rows: usize, dims: usize, seed: u64) -> Matrix {
    let mut rng = seeded_rng(seed);
    let hi = 0.1 / dims as f64;
    Matrix::from_vec(rows, dims, (0..rows * dims).map(|_| rng.random::<f64>() * hi).collect())
}

#[inline]
fn clamp_nonneg(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

struct Sampler {
    pair_words: Vec<u32>,
    pair_ctxs: Vec<u32>,
    pairs: WeightedAliasIndex<f64>,
    negatives: WeightedAliasIndex<f64>,
    neg_weight: Vec<f64>,
}

impl Sampler {
    fn new(cooc: &CooccurrenceTable, cfg: &DiveTrainConfig) -> Result<Self> {
        let mut pair_words = Vec::with_capacity(cooc.nnz());
        let mut pair_ctxs = Vec::with_capacity(cooc.nnz());
        let mut weights = Vec::with_capacity(cooc.nnz());
        for (w, c, n) in cooc.iter() {
            pair_words.push(w);
            pair_ctxs.push(c);
            weights.push(n as f64);
        }
        let pairs = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::Config(format!("cannot sample pairs: {e}")))?;
        let negatives = WeightedAliasIndex::new(negative_distribution(cooc, cfg.neg_exponent))
            .map_err(|e| Error::Config(format!("cannot sample negatives: {e}")))?;
        // each of the `negatives` draws carries an equal share of the expectation
        let neg_weight = cooc
            .word_totals()
            .iter()
            .map(|&n| {
                if n > 0 {
                    cfg.k_i * cooc.z() / (n as f64 * cfg.negatives as f64)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Sampler {
            pair_words,
            pair_ctxs,
            pairs,
            negatives,
            neg_weight,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn run_worker(
    words: &SharedMatrix,
    ctxs: &SharedMatrix,
    sampler: &Sampler,
    cfg: &DiveTrainConfig,
    seed: u64,
    samples: u64,
    done_before: u64,
    stride: u64,
    total: u64,
) {
    let dims = cfg.dims;
    let mut rng = seeded_rng(seed);
    let mut wbuf = vec![0.0; dims];
    let mut wgrad = vec![0.0; dims];
    let mut cbuf = vec![0.0; dims];
    let span = cfg.lr_start - cfg.lr_end;
    for s in 0..samples {
        let progress = (done_before + s * stride) as f64 / total as f64;
        let lr = (cfg.lr_start - span * progress).max(cfg.lr_end);
        let pair = sampler.pairs.sample(&mut rng);
        let w = sampler.pair_words[pair] as usize;
        let c = sampler.pair_ctxs[pair] as usize;
        words.load_row(w, &mut wbuf);
        wgrad.iter_mut().for_each(|g| *g = 0.0);

        let mut update_context = |ctx: usize, positive: bool, weight: f64, wgrad: &mut [f64]| {
            ctxs.load_row(ctx, &mut cbuf);
            let g = pair_coefficient(dot(&wbuf, &cbuf), positive, weight);
            for i in 0..dims {
                wgrad[i] += g * cbuf[i];
                cbuf[i] += lr * g * wbuf[i];
            }
            clamp_nonneg(&mut cbuf);
            ctxs.store_row(ctx, &cbuf);
        };

        update_context(c, true, 1.0, &mut wgrad);
        let nw = sampler.neg_weight[w];
        for _ in 0..cfg.negatives {
            let neg = sampler.negatives.sample(&mut rng);
            update_context(neg, false, nw, &mut wgrad);
        }
        for i in 0..dims {
            wbuf[i] += lr * wgrad[i];
        }
        clamp_nonneg(&mut wbuf);
        words.store_row(w, &wbuf);
    }
}

/// Trains DIVE by projected stochastic gradient ascent on the DIVE objective.
pub fn train_dive(cooc: &CooccurrenceTable, words: &[String], cfg: &DiveTrainConfig) -> Result<DiveEmbedding> {
    train_dive_observed(cooc, words, cfg, |_, _| {})
}

/// [`train_dive`] with a callback invoked after each epoch (1-based).
pub fn train_dive_observed<F>(
    cooc: &CooccurrenceTable,
    words: &[String],
    cfg: &DiveTrainConfig,
    mut on_epoch: F,
) -> Result<DiveEmbedding>
where
    F: FnMut(usize, &DiveEmbedding),
{
    cfg.validate()?;
    if words.len() != cooc.vocab_size() {
        return Err(Error::ContractViolation(format!(
            "{} words for a table over {} ids",
            words.len(),
            cooc.vocab_size()
        )));
    }
    if cooc.nnz() == 0 {
        return Err(Error::EmptyInput("co-occurrence table"));
    }
    let v = cooc.vocab_size();
    let mut w0 = initial_matrix(v, cfg.dims, derive_seed(cfg.seed, 0x1001));
    let mut c0 = initial_matrix(v, cfg.dims, derive_seed(cfg.seed, 0x1002));
    clamp_nonneg(w0.as_mut_slice());
    clamp_nonneg(c0.as_mut_slice());
    if cfg.epochs == 0 {
        return Ok(DiveEmbedding::new(words.to_vec(), w0, c0));
    }

    let sampler = Sampler::new(cooc, cfg)?;
    let word_m = SharedMatrix::new(w0);
    let ctx_m = SharedMatrix::new(c0);
    let per_epoch = cfg.samples_per_epoch.unwrap_or_else(|| cooc.total());
    let total = per_epoch * cfg.epochs as u64;
    let workers = cfg.workers as u64;

    for epoch in 0..cfg.epochs {
        let base = per_epoch * epoch as u64;
        if workers == 1 {
            let seed = derive_seed(cfg.seed, epoch as u64);
            run_worker(&word_m, &ctx_m, &sampler, cfg, seed, per_epoch, base, 1, total);
        } else {
            std::thread::scope(|s| {
                for k in 0..workers {
                    let share = per_epoch / workers + u64::from(k < per_epoch % workers);
                    let seed = derive_seed(cfg.seed, (epoch as u64) * workers + k);
                    let (wm, cm, sp) = (&word_m, &ctx_m, &sampler);
                    s.spawn(move || run_worker(wm, cm, sp, cfg, seed, share, base + k, workers, total));
                }
            });
        }
        if !word_m.all_finite() || !ctx_m.all_finite() {
            return Err(Error::Diverged { epoch: epoch + 1 });
        }
        log::debug!("dive epoch {}/{} done", epoch + 1, cfg.epochs);
        let snapshot = DiveEmbedding::new(words.to_vec(), word_m.snapshot(), ctx_m.snapshot());
        on_epoch(epoch + 1, &snapshot);
    }
    Ok(DiveEmbedding::new(words.to_vec(), word_m.into_matrix(), ctx_m.into_matrix()))
}
