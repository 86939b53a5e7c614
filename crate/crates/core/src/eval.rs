//! Word-context relevance Precision@1 and pseudoword purity.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::math::cosine;
use crate::senses::{Provenance, Sense, SenseModel};
use crate::sgns::DenseEmbedding;
use crate::{Error, Result};

pub const FALSE_CONTEXTS: usize = 10;
pub const MIN_PSEUDO_MENTIONS: usize = 200;

/// Sense vectors for targets and polysemous words, dense vectors for the rest.
pub struct SenseSpace<'a> {
    models: HashMap<&'a str, &'a SenseModel>,
    dense: &'a DenseEmbedding,
}

impl<'a> SenseSpace<'a> {
    pub fn new(models: &'a [SenseModel], dense: &'a DenseEmbedding) -> Self {
        SenseSpace {
            models: models.iter().map(|m| (m.word.as_str(), m)).collect(),
            dense,
        }
    }

    pub fn model(&self, word: &str) -> Option<&'a SenseModel> {
        self.models.get(word).copied()
    }

    /// Vector of `word` seen from target sense `s`: the closest of its sense
    /// vectors if it is polysemous, otherwise its dense vector.
    fn context_vector(&self, word: &str, s: &[f64]) -> Option<&'a [f64]> {
        match self.model(word) {
            Some(m) => m
                .vectors()
                .fold(None, |best: Option<(&[f64], f64)>, v| {
                    let c = cosine(v, s);
                    match best {
                        Some((_, b)) if b >= c => best,
                        _ => Some((v, c)),
                    }
                })
                .map(|(v, _)| v),
            None => self.dense.vector(word),
        }
    }
}

/// One sense per word, taken from the dense embedding. Scoring with these
/// models gives the plain skip-gram baseline.
pub fn single_sense_models<S: AsRef<str>>(dense: &DenseEmbedding, words: &[S]) -> Vec<SenseModel> {
    words
        .iter()
        .filter_map(|w| {
            let v = dense.vector(w.as_ref())?;
            Some(SenseModel {
                word: w.as_ref().to_string(),
                senses: vec![Sense {
                    id: 0,
                    bases: vec![],
                    vector: v.to_vec(),
                    stale: false,
                }],
                provenance: Provenance::Initial,
            })
        })
        .collect()
}

/// `max_k cos(s_k, e_c(k))`, where `e_c(k)` averages the context words' vectors
/// chosen relative to target sense `s_k`.
pub fn target_context_similarity<S: AsRef<str>>(space: &SenseSpace, target: &str, context: &[S]) -> Result<f64> {
    let model = space.model(target).ok_or_else(|| Error::UnknownWord(target.to_string()))?;
    let mut best = f64::NEG_INFINITY;
    for s in model.vectors() {
        let mut acc = vec![0.0; s.len()];
        let mut n = 0usize;
        for w in context {
            if let Some(v) = space.context_vector(w.as_ref(), s) {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::EmptyContext);
        }
        best = best.max(cosine(s, &acc));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcrQuery {
    pub target: String,
    pub true_context: Vec<String>,
    pub false_contexts: Vec<Vec<String>>,
}

impl WcrQuery {
    pub fn validate(&self) -> Result<()> {
        if self.false_contexts.len() != FALSE_CONTEXTS {
            return Err(Error::ContractViolation(format!(
                "query '{}' has {} false contexts, expected {FALSE_CONTEXTS}",
                self.target,
                self.false_contexts.len()
            )));
        }
        if self.true_context.is_empty() || self.false_contexts.iter().any(Vec::is_empty) {
            return Err(Error::ContractViolation(format!("query '{}' has an empty context", self.target)));
        }
        Ok(())
    }
}

fn context_words(field: &str) -> Vec<String> {
    field.split(',').map(str::trim).filter(|w| !w.is_empty()).map(String::from).collect()
}

/// Parses `target<TAB>true|false<TAB>w1,w2,...` lines. A `true` line opens a
/// query; the following `false` lines with the same target complete it.
pub fn parse_wcr(text: &str, path: &Path) -> Result<Vec<WcrQuery>> {
    let mut queries: Vec<WcrQuery> = Vec::new();
    let mut starts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::schema(path, lineno, "expected 3 tab-separated fields"));
        }
        let (target, label, ctx) = (fields[0].trim(), fields[1].trim(), context_words(fields[2]));
        if ctx.is_empty() {
            return Err(Error::schema(path, lineno, "empty context"));
        }
        match label {
            "true" => {
                queries.push(WcrQuery {
                    target: target.to_string(),
                    true_context: ctx,
                    false_contexts: Vec::new(),
                });
                starts.push(lineno);
            }
            "false" => match queries.last_mut() {
                Some(q) if q.target == target => q.false_contexts.push(ctx),
                _ => return Err(Error::schema(path, lineno, format!("false context for '{target}' without a preceding true context"))),
            },
            other => return Err(Error::schema(path, lineno, format!("label must be true or false, got '{other}'"))),
        }
    }
    for (q, line) in queries.iter().zip(starts) {
        if q.false_contexts.len() != FALSE_CONTEXTS {
            return Err(Error::schema(
                path,
                line,
                format!("query '{}' has {} false contexts, expected {FALSE_CONTEXTS}", q.target, q.false_contexts.len()),
            ));
        }
    }
    Ok(queries)
}

pub fn read_wcr(path: &Path) -> Result<Vec<WcrQuery>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_wcr(&text, path)
}

pub fn format_wcr(queries: &[WcrQuery]) -> String {
    let mut out = String::new();
    for q in queries {
        out.push_str(&format!("{}\ttrue\t{}\n", q.target, q.true_context.join(",")));
        for f in &q.false_contexts {
            out.push_str(&format!("{}\tfalse\t{}\n", q.target, f.join(",")));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub target: String,
    pub hit: bool,
    /// `null` when the context had no usable word.
    pub true_score: Option<f64>,
    pub best_false_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: String,
    pub value: f64,
    pub queries: usize,
    pub per_query: Vec<QueryOutcome>,
}

impl EvalReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Fraction of queries whose true context scores strictly above every false
/// context. Unscorable contexts rank last; an unscorable true context fails.
pub fn wcr_precision_at_1(space: &SenseSpace, queries: &[WcrQuery]) -> EvalReport {
    let per_query: Vec<QueryOutcome> = queries
        .iter()
        .map(|q| {
            let true_score = target_context_similarity(space, &q.target, &q.true_context).ok();
            let best_false_score = q
                .false_contexts
                .iter()
                .filter_map(|c| target_context_similarity(space, &q.target, c).ok())
                .reduce(f64::max);
            let hit = match (true_score, best_false_score) {
                (Some(t), Some(f)) => t > f,
                (Some(_), None) => true,
                (None, _) => false,
            };
            QueryOutcome {
                target: q.target.clone(),
                hit,
                true_score,
                best_false_score,
            }
        })
        .collect();
    let hits = per_query.iter().filter(|q| q.hit).count();
    EvalReport {
        metric: "wcr_precision_at_1".into(),
        value: if per_query.is_empty() { 0.0 } else { hits as f64 / per_query.len() as f64 },
        queries: per_query.len(),
        per_query,
    }
}

/// Corpus with two words conflated into one, plus the source of each mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudowordTask {
    pub docs: Vec<Vec<String>>,
    pub pseudo: String,
    pub sources: [String; 2],
    /// `(corpus position, 0 for the first word or 1 for the second)`, by position.
    pub gold: Vec<(usize, usize)>,
}

impl PseudowordTask {
    pub fn labels(&self) -> Vec<usize> {
        self.gold.iter().map(|g| g.1).collect()
    }

    /// `position<TAB>source word`, one mention per line.
    pub fn gold_tsv(&self) -> String {
        self.gold.iter().map(|(p, l)| format!("{p}\t{}\n", self.sources[*l])).collect()
    }
}

/// Replaces every mention of `word_a` and `word_b` with `pseudo`. Positions
/// count tokens across all documents.
pub fn make_pseudoword_task(
    docs: &[Vec<String>],
    word_a: &str,
    word_b: &str,
    pseudo: &str,
    min_mentions: usize,
) -> Result<PseudowordTask> {
    if word_a == word_b {
        return Err(Error::DegeneratePseudoword(format!("both source words are '{word_a}'")));
    }
    if pseudo.is_empty() {
        return Err(Error::DegeneratePseudoword("empty pseudoword".into()));
    }
    let mut out = Vec::with_capacity(docs.len());
    let mut gold = Vec::new();
    let mut counts = [0usize; 2];
    let mut position = 0;
    for doc in docs {
        let mut d = Vec::with_capacity(doc.len());
        for tok in doc {
            let label = if tok == word_a {
                Some(0)
            } else if tok == word_b {
                Some(1)
            } else {
                None
            };
            match label {
                Some(l) => {
                    counts[l] += 1;
                    gold.push((position, l));
                    d.push(pseudo.to_string());
                }
                None if tok == pseudo => {
                    return Err(Error::DegeneratePseudoword(format!("'{pseudo}' already occurs in the corpus")));
                }
                None => d.push(tok.clone()),
            }
            position += 1;
        }
        out.push(d);
    }
    for (word, &found) in [word_a, word_b].iter().zip(&counts) {
        if found < min_mentions {
            return Err(Error::InsufficientMentions {
                word: word.to_string(),
                found,
                required: min_mentions,
            });
        }
    }
    Ok(PseudowordTask {
        docs: out,
        pseudo: pseudo.to_string(),
        sources: [word_a.to_string(), word_b.to_string()],
        gold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub purity: f64,
    pub adjusted_rand_index: f64,
    pub mentions: usize,
}

fn contingency(assignments: &[usize], gold: &[usize]) -> HashMap<(usize, usize), usize> {
    let mut table = HashMap::new();
    for (&a, &g) in assignments.iter().zip(gold) {
        *table.entry((a, g)).or_insert(0) += 1;
    }
    table
}

fn pairs(n: usize) -> f64 {
    n as f64 * (n as f64 - 1.0) / 2.0
}

/// Purity of `assignments` against `gold` (aligned per mention) and the
/// adjusted Rand index.
pub fn pseudoword_purity(assignments: &[usize], gold: &[usize]) -> PurityReport {
    assert_eq!(assignments.len(), gold.len(), "assignments and gold must align");
    let n = gold.len();
    if n == 0 {
        return PurityReport {
            purity: 0.0,
            adjusted_rand_index: 0.0,
            mentions: 0,
        };
    }
    let table = contingency(assignments, gold);
    let mut best: HashMap<usize, usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&(a, g), &c) in &table {
        let b = best.entry(a).or_insert(0);
        *b = (*b).max(c);
        *rows.entry(a).or_insert(0) += c;
        *cols.entry(g).or_insert(0) += c;
    }
    let purity = best.values().sum::<usize>() as f64 / n as f64;
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_rows: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_cols: f64 = cols.values().map(|&c| pairs(c)).sum();
    let expected = sum_rows * sum_cols / pairs(n).max(f64::MIN_POSITIVE);
    let max_index = 0.5 * (sum_rows + sum_cols);
    let ari = if (max_index - expected).abs() < 1e-12 {
        1.0
    } else {
        (index - expected) / (max_index - expected)
    };
    PurityReport {
        purity,
        adjusted_rand_index: ari,
        mentions: n,
    }
}
