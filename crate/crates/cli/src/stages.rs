use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsi_core::corpus::{
    build_vocabulary, count_cooccurrences_sharded, tokenize_documents, CooccurrenceTable, TokenStream,
    TokenizerRules, Vocabulary,
};
use wsi_core::dive::{train_dive, DiveEmbedding};
use wsi_core::egograph::TopWords;
use wsi_core::eval::{
    make_pseudoword_task, pseudoword_purity, read_wcr, single_sense_models, wcr_precision_at_1, EvalReport,
    PurityReport, SenseSpace, MIN_PSEUDO_MENTIONS,
};
use wsi_core::refine::{assign_senses, em_refine, RefineConfig, SenseTaggedCorpus};
use wsi_core::senses::{induce, read_sense_models, write_inventory, write_sense_models, SenseModel, TopicCache};
use wsi_core::sgns::{train_sgns, DenseEmbedding};
use wsi_core::Error;

use crate::config::PipelineConfig;
use crate::CliError;

pub const TOKENS: &str = "tokens.txt";
pub const VOCAB: &str = "vocab.tsv";
pub const PSEUDO: &str = "pseudo.json";
pub const COOC: &str = "cooc.tsv";
pub const DIVE: &str = "dive.vec";
pub const SGNS: &str = "sgns.vec";
pub const SENSES: &str = "senses.json";
pub const INVENTORY: &str = "inventory.tsv";
pub const EGO: &str = "ego.json";
pub const REFINED_SENSES: &str = "refined_senses.json";
pub const REFINED_SGNS: &str = "refined_sgns.vec";
pub const TAGGED: &str = "tagged.txt";
pub const REFINE_REPORT: &str = "refine_report.json";
pub const WCR_REPORT: &str = "wcr_report.json";
pub const PSEUDO_REPORT: &str = "pseudo_report.json";

/// The directory holding every artifact of one pipeline run.
#[derive(Debug, Clone)]
pub struct Workdir {
    root: PathBuf,
}

impl Workdir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workdir { root: root.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Path of an input artifact, or a dependency error naming its producer.
    pub fn require(&self, name: &str, producer: &'static str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(CliError::MissingArtifact { path: p, producer })
        }
    }

    fn create(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e).into())
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    }

    /// Records the configuration a stage ran with next to its outputs.
    pub fn record_config(&self, stage: &str, cfg: &PipelineConfig) -> Result<(), CliError> {
        self.write(&format!("{stage}.config.json"), &cfg.to_json()).map(|_| ())
    }
}

fn stopword_rules(spec: &str) -> Result<TokenizerRules, CliError> {
    match spec {
        "english" => Ok(TokenizerRules::english()),
        "none" => Ok(TokenizerRules::no_stopwords()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read stop list {path}: {e}")))?;
            Ok(TokenizerRules::with_stopwords(text.split_whitespace()))
        }
    }
}

/// Source words and gold labels of a conflated pseudoword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoGold {
    pub pseudo: String,
    pub sources: [String; 2],
    pub positions: Vec<usize>,
    pub labels: Vec<usize>,
}

/// `a:b:name` from the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoSpec {
    pub word_a: String,
    pub word_b: String,
    pub pseudo: String,
}

impl std::str::FromStr for PseudoSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, p] if !a.is_empty() && !b.is_empty() && !p.is_empty() => Ok(PseudoSpec {
                word_a: a.to_string(),
                word_b: b.to_string(),
                pseudo: p.to_string(),
            }),
            _ => Err(format!("expected WORD_A:WORD_B:PSEUDO, got '{s}'")),
        }
    }
}

fn write_tokens(path: &Path, docs: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = String::new();
    for d in docs {
        out.push_str(&d.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e).into())
}

fn read_tokens(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.split_whitespace().map(String::from).collect::<Vec<_>>())
        .filter(|d| !d.is_empty())
        .collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Json {
            path: path.to_path_buf(),
            source: e,
        }
        .into()
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Tokenizes the raw corpus, optionally conflates a pseudoword, and builds the
/// vocabulary.
pub fn ingest(cfg: &PipelineConfig, wd: &Workdir, pseudo: Option<&PseudoSpec>) -> Result<(), CliError> {
    let corpus = cfg
        .corpus
        .path
        .as_ref()
        .ok_or_else(|| CliError::Usage("ingest needs a corpus (--corpus or corpus.path)".into()))?;
    if !corpus.is_file() {
        return Err(CliError::MissingArtifact {
            path: corpus.clone(),
            producer: "sample-corpus",
        });
    }
    let raw = std::fs::read(corpus).map_err(|e| Error::io(corpus, e))?;
    let rules = stopword_rules(&cfg.corpus.stopwords)?;
    let mut docs = tokenize_documents(&raw, &rules)?;
    wd.create()?;
    let pseudo_path = wd.path(PSEUDO);
    match pseudo {
        Some(spec) => {
            let task = make_pseudoword_task(&docs, &spec.word_a, &spec.word_b, &spec.pseudo, MIN_PSEUDO_MENTIONS)?;
            let gold = PseudoGold {
                pseudo: task.pseudo.clone(),
                sources: task.sources.clone(),
                positions: task.gold.iter().map(|g| g.0).collect(),
                labels: task.labels(),
            };
            wd.write(PSEUDO, &to_json(&gold))?;
            docs = task.docs;
        }
        None if pseudo_path.exists() => {
            std::fs::remove_file(&pseudo_path).map_err(|e| Error::io(&pseudo_path, e))?;
        }
        None => {}
    }
    let vocab = build_vocabulary(docs.iter().flatten(), cfg.corpus.min_count)?;
    vocab.write_tsv(&wd.path(VOCAB))?;
    write_tokens(&wd.path(TOKENS), &docs)?;
    log::info!("{} documents, {} tokens, {} vocabulary words", docs.len(), docs.iter().map(Vec::len).sum::<usize>(), vocab.len());
    wd.record_config("ingest", cfg)
}

fn load_vocab(wd: &Workdir) -> Result<Vocabulary, CliError> {
    Ok(Vocabulary::read_tsv(&wd.require(VOCAB, "ingest")?)?)
}

fn load_stream(wd: &Workdir, vocab: &Vocabulary) -> Result<TokenStream, CliError> {
    let docs = read_tokens(&wd.require(TOKENS, "ingest")?)?;
    Ok(TokenStream::encode(&docs, vocab))
}

pub fn cooc(cfg: &PipelineConfig, wd: &Workdir) -> Result<(), CliError> {
    let vocab = load_vocab(wd)?;
    let stream = load_stream(wd, &vocab)?;
    let table = count_cooccurrences_sharded(&stream, cfg.corpus.window, vocab.len(), cfg.corpus.shards)?;
    table.write_tsv(&wd.path(COOC), &vocab)?;
    log::info!("{} nonzero pairs, total {}", table.nnz(), table.total());
    wd.record_config("cooc", cfg)
}

pub fn train_dive_stage(cfg: &PipelineConfig, wd: &Workdir) -> Result<(), CliError> {
    let vocab = load_vocab(wd)?;
    let table = CooccurrenceTable::read_tsv(&wd.require(COOC, "cooc")?, &vocab)?;
    let dive = train_dive(&table, vocab.words(), &cfg.dive)?;
    dive.write(&wd.path(DIVE))?;
    wd.record_config("train-dive", cfg)
}

pub fn train_sgns_stage(cfg: &PipelineConfig, wd: &Workdir) -> Result<(), CliError> {
    let vocab = load_vocab(wd)?;
    let stream = load_stream(wd, &vocab)?;
    let dense = train_sgns(&stream, vocab.words(), &cfg.sgns)?;
    dense.write(&wd.path(SGNS))?;
    wd.record_config("train-sgns", cfg)
}

pub fn load_dive(wd: &Workdir) -> Result<DiveEmbedding, CliError> {
    Ok(DiveEmbedding::read(&wd.require(DIVE, "train-dive")?)?)
}

/// Which sense models (and matching dense embedding) a stage should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SenseSource {
    /// Refined models if refinement has run, initial ones otherwise.
    Auto,
    Initial,
    Refined,
}

fn load_senses(wd: &Workdir, source: SenseSource) -> Result<(Vec<SenseModel>, DenseEmbedding), CliError> {
    let refined = match source {
        SenseSource::Auto => wd.path(REFINED_SENSES).is_file(),
        SenseSource::Initial => false,
        SenseSource::Refined => true,
    };
    let (senses, dense, producer) = if refined {
        (REFINED_SENSES, REFINED_SGNS, "refine")
    } else {
        (SENSES, SGNS, "induce")
    };
    let models = read_sense_models(&wd.require(senses, producer)?)?;
    let dense_producer = if refined { "refine" } else { "train-sgns" };
    let dense = DenseEmbedding::read(&wd.require(dense, dense_producer)?)?;
    Ok((models, dense))
}

/// Induces senses for `words`, or for every vocabulary word with a nonzero
/// DIVE row when `words` is empty.
pub fn induce_stage(cfg: &PipelineConfig, wd: &Workdir, words: &[String]) -> Result<(), CliError> {
    let dive = load_dive(wd)?;
    let dense = DenseEmbedding::read(&wd.require(SGNS, "train-sgns")?)?;
    let top = TopWords::build(&dive, cfg.induce.n);
    let topics = TopicCache::build(&dive, &dense, cfg.induce.m);
    let all = words.is_empty();
    let targets: Vec<String> = if all { dive.words().to_vec() } else { words.to_vec() };
    let mut models = Vec::new();
    let mut networks = Vec::new();
    for w in &targets {
        match induce(&dive, &top, &topics, w, &cfg.induce) {
            Ok(ind) => {
                networks.push(ind.network);
                models.push(ind.model);
            }
            Err(Error::NoSenses(_)) if all => log::warn!("'{w}' has no senses, skipped"),
            Err(e) => return Err(e.into()),
        }
    }
    write_sense_models(&wd.path(SENSES), &models)?;
    write_inventory(&wd.path(INVENTORY), &dive, &models)?;
    wsi_core::egograph::EgoNetwork::write_json(&networks, &wd.path(EGO))?;
    log::info!("induced senses for {} words", models.len());
    wd.record_config("induce", cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub iterations: usize,
    /// Fraction of mentions changing sense between consecutive E-steps.
    pub churn: Vec<f64>,
    pub mentions: usize,
    pub without_context: usize,
    /// Per E-step purity of the pseudoword, when the corpus has one.
    pub pseudo_purity: Option<Vec<PurityReport>>,
}

/// Senses given to the pseudoword's mentions, aligned with its gold labels.
fn pseudo_assignments(tagged: &SenseTaggedCorpus, senses: &[usize], gold: &PseudoGold) -> Option<Vec<usize>> {
    let t = tagged.targets.iter().position(|w| *w == gold.pseudo)?;
    let picked: Vec<(usize, usize)> = tagged
        .mentions
        .iter()
        .zip(senses)
        .filter(|(m, _)| m.target == t)
        .map(|(m, &s)| (m.position, s))
        .collect();
    if picked.len() != gold.positions.len() || picked.iter().zip(&gold.positions).any(|(p, g)| p.0 != *g) {
        log::warn!("pseudoword mentions do not line up with the gold positions");
        return None;
    }
    Some(picked.into_iter().map(|p| p.1).collect())
}

fn load_pseudo(wd: &Workdir) -> Result<Option<PseudoGold>, CliError> {
    let p = wd.path(PSEUDO);
    if p.is_file() {
        read_json(&p).map(Some)
    } else {
        Ok(None)
    }
}

pub fn refine_stage(cfg: &PipelineConfig, wd: &Workdir) -> Result<(), CliError> {
    let vocab = load_vocab(wd)?;
    let stream = load_stream(wd, &vocab)?;
    let (models, dense) = load_senses(wd, SenseSource::Initial)?;
    let rcfg = RefineConfig {
        sentence_len: cfg.refine.sentence_len,
        iterations: cfg.refine.iterations,
        warm_start: cfg.refine.warm_start,
        sgns: cfg.sgns.clone(),
    };
    let out = em_refine(&stream, vocab.words(), &models, &dense, &rcfg)?;
    let gold = load_pseudo(wd)?;
    let pseudo_purity = gold.as_ref().and_then(|g| {
        out.history
            .iter()
            .map(|h| pseudo_assignments(&out.tagged, h, g).map(|a| pseudoword_purity(&a, &g.labels)))
            .collect::<Option<Vec<_>>>()
    });
    let report = RefineReport {
        iterations: cfg.refine.iterations,
        churn: out.churn(),
        mentions: out.tagged.mentions.len(),
        without_context: out.tagged.without_context,
        pseudo_purity,
    };
    write_sense_models(&wd.path(REFINED_SENSES), &out.models)?;
    out.dense.write(&wd.path(REFINED_SGNS))?;
    out.tagged.write(&wd.path(TAGGED), vocab.words())?;
    wd.write(REFINE_REPORT, &to_json(&report))?;
    wd.record_config("refine", cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcrReport {
    pub senses: EvalReport,
    /// The same queries scored with one skip-gram vector per word.
    pub baseline: EvalReport,
}

pub fn eval_wcr(cfg: &PipelineConfig, wd: &Workdir, source: SenseSource) -> Result<WcrReport, CliError> {
    let queries_path = cfg
        .eval
        .queries
        .as_ref()
        .ok_or_else(|| CliError::Usage("eval-wcr needs a query file (--queries or eval.queries)".into()))?;
    if !queries_path.is_file() {
        return Err(CliError::MissingArtifact {
            path: queries_path.clone(),
            producer: "sample-wcr",
        });
    }
    let queries = read_wcr(queries_path)?;
    let (models, dense) = load_senses(wd, source)?;
    let senses = wcr_precision_at_1(&SenseSpace::new(&models, &dense), &queries);
    let plain = DenseEmbedding::read(&wd.require(SGNS, "train-sgns")?)?;
    let targets: Vec<&str> = queries.iter().map(|q| q.target.as_str()).collect();
    let single = single_sense_models(&plain, &targets);
    let mut baseline = wcr_precision_at_1(&SenseSpace::new(&single, &plain), &queries);
    baseline.metric = "wcr_precision_at_1_skipgram".into();
    let report = WcrReport { senses, baseline };
    wd.write(WCR_REPORT, &to_json(&report))?;
    wd.record_config("eval-wcr", cfg)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoReport {
    pub pseudo: String,
    pub sources: [String; 2],
    pub initial: PurityReport,
    pub refined: Option<PurityReport>,
}

pub fn eval_pseudo(cfg: &PipelineConfig, wd: &Workdir) -> Result<PseudoReport, CliError> {
    let gold: PseudoGold = read_json(&wd.require(PSEUDO, "ingest --pseudo")?)?;
    let vocab = load_vocab(wd)?;
    let chunks = load_stream(wd, &vocab)?.chunked(cfg.refine.sentence_len.max(1));
    let purity = |source| -> Result<PurityReport, CliError> {
        let (models, dense) = load_senses(wd, source)?;
        let model: Vec<SenseModel> = models.into_iter().filter(|m| m.word == gold.pseudo).collect();
        if model.is_empty() {
            return Err(Error::UnknownWord(format!("{} (no sense model; run `wsi induce {}`)", gold.pseudo, gold.pseudo)).into());
        }
        let tagged = assign_senses(&chunks, vocab.words(), &model, &dense)?;
        let assigned = pseudo_assignments(&tagged, &tagged.senses(), &gold)
            .ok_or_else(|| Error::ContractViolation("pseudoword mentions do not match gold positions".into()))?;
        Ok(pseudoword_purity(&assigned, &gold.labels))
    };
    let initial = purity(SenseSource::Initial)?;
    let refined = if wd.path(REFINED_SENSES).is_file() {
        Some(purity(SenseSource::Refined)?)
    } else {
        None
    };
    let report = PseudoReport {
        pseudo: gold.pseudo.clone(),
        sources: gold.sources.clone(),
        initial,
        refined,
    };
    wd.write(PSEUDO_REPORT, &to_json(&report))?;
    wd.record_config("eval-pseudo", cfg)?;
    Ok(report)
}

pub fn sample_corpus(out: &Path, tokens: usize, seed: u64) -> Result<(), CliError> {
    let cfg = wsi_core::synth::SampleCorpusConfig {
        tokens,
        seed,
        ..Default::default()
    };
    let text = wsi_core::synth::sample_corpus(&cfg);
    std::fs::write(out, text).map_err(|e| Error::io(out, e).into())
}

pub fn sample_wcr(out: &Path, context_len: usize, seed: u64) -> Result<(), CliError> {
    let targets = wsi_core::synth::polysemous_words();
    let queries = wsi_core::synth::synthetic_wcr_queries(&targets, context_len, seed);
    std::fs::write(out, wsi_core::eval::format_wcr(&queries)).map_err(|e| Error::io(out, e).into())
}
