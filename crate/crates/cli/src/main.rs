use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wsi_cli::config::PipelineConfig;
use wsi_cli::stages::{self, PseudoSpec, SenseSource, Workdir};
use wsi_cli::{inspect, CliError};

/// Word sense induction from non-negative embedding bases.
#[derive(Parser, Debug)]
#[command(name = "wsi", version)]
struct Cli {
    /// JSON configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory holding the pipeline artifacts.
    #[arg(long, global = true, default_value = "wsi-work")]
    workdir: PathBuf,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tokenize a corpus and build the vocabulary.
    Ingest(IngestArgs),
    /// Count windowed co-occurrences.
    Cooc(CoocArgs),
    /// Train the non-negative DIVE embedding.
    TrainDive(DiveArgs),
    /// Train the dense skip-gram embedding.
    TrainSgns(SgnsArgs),
    /// Induce sense embeddings for the given words.
    Induce(InduceArgs),
    /// Refine sense embeddings by relabeling mentions and retraining.
    Refine(RefineArgs),
    /// Word-context relevance Precision@1.
    EvalWcr(EvalWcrArgs),
    /// Sense purity of the conflated pseudoword.
    EvalPseudo(EvalPseudoArgs),
    /// Show a word's sense clusters with the top words of their main bases.
    Inspect(InspectArgs),
    /// Write the synthetic sample corpus.
    SampleCorpus(SampleCorpusArgs),
    /// Write synthetic context-relevance queries for the sample corpus.
    SampleWcr(SampleWcrArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Raw UTF-8 text, one document per line.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    min_count: Option<u64>,
    /// `english`, `none`, or a file of stop words.
    #[arg(long)]
    stopwords: Option<String>,
    /// Conflate two words into a pseudoword: WORD_A:WORD_B:PSEUDO.
    #[arg(long)]
    pseudo: Option<PseudoSpec>,
}

#[derive(Args, Debug)]
struct CoocArgs {
    #[arg(long)]
    window: Option<usize>,
    /// Count in this many threads.
    #[arg(long)]
    shards: Option<usize>,
}

#[derive(Args, Debug)]
struct DiveArgs {
    /// Number of basis indexes L.
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    k_i: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    samples_per_epoch: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 is bit-reproducible.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct SgnsArgs {
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 is bit-reproducible.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct InduceArgs {
    /// Target words.
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    words: Vec<String>,
    /// Induce senses for every vocabulary word.
    #[arg(long)]
    all: bool,
    /// Number of sense clusters.
    #[arg(long)]
    k: Option<usize>,
    /// Top words per basis in ego-network features.
    #[arg(long)]
    n: Option<usize>,
    /// Top words per basis in topic embeddings.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Leave the query word out of the top-word lists.
    #[arg(long)]
    exclude_query: bool,
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    sentence_len: Option<usize>,
    /// Start each retraining from the previous embedding.
    #[arg(long)]
    warm_start: bool,
    #[command(flatten)]
    sgns: SgnsArgs,
}

#[derive(Args, Debug)]
struct EvalWcrArgs {
    /// Query file: target<TAB>true|false<TAB>comma-separated words.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    senses: SenseSource,
}

#[derive(Args, Debug)]
struct EvalPseudoArgs {
    #[arg(long)]
    sentence_len: Option<usize>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    word: String,
    /// Bases shown per cluster.
    #[arg(long, default_value_t = 2)]
    bases: usize,
    /// Words shown per basis.
    #[arg(long, default_value_t = 5)]
    words: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    exclude_query: bool,
}

#[derive(Args, Debug)]
struct SampleCorpusArgs {
    #[arg(long)]
    out: PathBuf,
    /// Approximate raw token count.
    #[arg(long, default_value_t = 1_000_000)]
    tokens: usize,
    #[arg(long, default_value_t = 2018)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SampleWcrArgs {
    #[arg(long)]
    out: PathBuf,
    /// Words per context.
    #[arg(long, default_value_t = 8)]
    context_len: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_sgns(cfg: &mut PipelineConfig, a: &SgnsArgs) {
    let s = &mut cfg.sgns;
    set(&mut s.dims, a.dims);
    set(&mut s.window, a.window);
    set(&mut s.negatives, a.negatives);
    set(&mut s.epochs, a.epochs);
    set(&mut s.lr_start, a.lr);
    set(&mut s.seed, a.seed);
    set(&mut s.workers, a.workers);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let wd = Workdir::new(&cli.workdir);
    match cli.command {
        Command::Ingest(a) => {
            set(&mut cfg.corpus.path, a.corpus.map(Some));
            set(&mut cfg.corpus.min_count, a.min_count);
            set(&mut cfg.corpus.stopwords, a.stopwords);
            stages::ingest(&cfg, &wd, a.pseudo.as_ref())
        }
        Command::Cooc(a) => {
            set(&mut cfg.corpus.window, a.window);
            set(&mut cfg.corpus.shards, a.shards);
            stages::cooc(&cfg, &wd)
        }
        Command::TrainDive(a) => {
            let d = &mut cfg.dive;
            set(&mut d.dims, a.dims);
            set(&mut d.k_i, a.k_i);
            set(&mut d.epochs, a.epochs);
            set(&mut d.lr_start, a.lr);
            set(&mut d.negatives, a.negatives);
            set(&mut d.samples_per_epoch, a.samples_per_epoch.map(Some));
            set(&mut d.seed, a.seed);
            set(&mut d.workers, a.workers);
            stages::train_dive_stage(&cfg, &wd)
        }
        Command::TrainSgns(a) => {
            apply_sgns(&mut cfg, &a);
            stages::train_sgns_stage(&cfg, &wd)
        }
        Command::Induce(a) => {
            let i = &mut cfg.induce;
            set(&mut i.k, a.k);
            set(&mut i.n, a.n);
            set(&mut i.m, a.m);
            set(&mut i.seed, a.seed);
            i.exclude_query |= a.exclude_query;
            stages::induce_stage(&cfg, &wd, &a.words)
        }
        Command::Refine(a) => {
            set(&mut cfg.refine.iterations, a.iterations);
            set(&mut cfg.refine.sentence_len, a.sentence_len);
            cfg.refine.warm_start |= a.warm_start;
            apply_sgns(&mut cfg, &a.sgns);
            stages::refine_stage(&cfg, &wd)
        }
        Command::EvalWcr(a) => {
            set(&mut cfg.eval.queries, a.queries.map(Some));
            let r = stages::eval_wcr(&cfg, &wd, a.senses)?;
            println!("precision@1 senses {:.4}  skip-gram {:.4}  ({} queries)", r.senses.value, r.baseline.value, r.senses.queries);
            Ok(())
        }
        Command::EvalPseudo(a) => {
            set(&mut cfg.refine.sentence_len, a.sentence_len);
            let r = stages::eval_pseudo(&cfg, &wd)?;
            println!("initial purity {:.4}  ARI {:.4}", r.initial.purity, r.initial.adjusted_rand_index);
            if let Some(p) = r.refined {
                println!("refined purity {:.4}  ARI {:.4}", p.purity, p.adjusted_rand_index);
            }
            Ok(())
        }
        Command::Inspect(a) => {
            let i = &mut cfg.induce;
            set(&mut i.k, a.k);
            set(&mut i.n, a.n);
            set(&mut i.seed, a.seed);
            i.exclude_query |= a.exclude_query;
            let dive = stages::load_dive(&wd)?;
            print!("{}", inspect::render(&dive, &a.word, &cfg.induce, a.bases, a.words)?);
            Ok(())
        }
        Command::SampleCorpus(a) => stages::sample_corpus(&a.out, a.tokens, a.seed),
        Command::SampleWcr(a) => stages::sample_wcr(&a.out, a.context_len, a.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
