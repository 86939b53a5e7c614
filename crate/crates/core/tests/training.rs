use wsi_core::corpus::{build_vocabulary, count_cooccurrences, TokenStream, Vocabulary};
use wsi_core::dive::{dive_objective, train_dive, train_dive_observed, DiveEmbedding, DiveTrainConfig};
use wsi_core::eval::make_pseudoword_task;
use wsi_core::math::cosine;
use wsi_core::refine::{em_refine, RefineConfig};
use wsi_core::senses::{induce, InduceConfig, TopicCache};
use wsi_core::egograph::TopWords;
use wsi_core::sgns::{train_sgns, DenseEmbedding, SgnsConfig};
use wsi_core::synth::{nested_context_corpus, two_topic_corpus};

fn encode(docs: &[Vec<String>]) -> (Vocabulary, TokenStream) {
    let vocab = build_vocabulary(docs.iter().flatten(), 1).unwrap();
    let stream = TokenStream::encode(docs, &vocab);
    (vocab, stream)
}

fn dive_on(docs: &[Vec<String>], cfg: &DiveTrainConfig) -> DiveEmbedding {
    let (vocab, stream) = encode(docs);
    let cooc = count_cooccurrences(&stream, 5, vocab.len()).unwrap();
    train_dive(&cooc, vocab.words(), cfg).unwrap()
}

fn mean_cosines(vec_of: impl Fn(&str) -> Vec<f64>, group: usize) -> (f64, f64) {
    let (mut within, mut across, mut nw, mut na) = (0.0, 0.0, 0, 0);
    for i in 0..group {
        for j in 0..group {
            let a = vec_of(&format!("a{i}"));
            if i != j {
                within += cosine(&a, &vec_of(&format!("a{j}")));
                nw += 1;
            }
            across += cosine(&a, &vec_of(&format!("b{j}")));
            na += 1;
        }
    }
    (within / nw as f64, across / na as f64)
}

#[test]
fn dive_separates_disjoint_topics_and_stays_nonnegative() {
    let docs = two_topic_corpus(8, 400, 20, 3);
    let cfg = DiveTrainConfig { dims: 10, epochs: 2, ..Default::default() };
    let dive = dive_on(&docs, &cfg);
    assert!(dive.min_entry() >= 0.0);
    assert!(dive.ctx_vecs.as_slice().iter().all(|&x| x >= 0.0));
    let (within, across) = mean_cosines(|w| dive.row(dive.id_of(w).unwrap()).to_vec(), 8);
    assert!(within > across + 0.3, "within {within} across {across}");
}

#[test]
fn dive_training_raises_the_objective() {
    let docs = two_topic_corpus(6, 200, 15, 9);
    let (vocab, stream) = encode(&docs);
    let cooc = count_cooccurrences(&stream, 5, vocab.len()).unwrap();
    let cfg = DiveTrainConfig { dims: 8, epochs: 3, ..Default::default() };
    let start = train_dive(&cooc, vocab.words(), &DiveTrainConfig { epochs: 0, ..cfg.clone() }).unwrap();
    let mut values = vec![dive_objective(&start, &cooc, &cfg)];
    train_dive_observed(&cooc, vocab.words(), &cfg, |_, e| values.push(dive_objective(e, &cooc, &cfg))).unwrap();
    assert!(values.last().unwrap() > &values[0], "{values:?}");
}

#[test]
fn dive_is_bitwise_deterministic_with_one_worker() {
    let docs = two_topic_corpus(5, 100, 12, 1);
    let cfg = DiveTrainConfig { dims: 6, epochs: 2, seed: 42, ..Default::default() };
    let a = dive_on(&docs, &cfg);
    let b = dive_on(&docs, &cfg);
    assert_eq!(a.word_vecs.as_slice(), b.word_vecs.as_slice());
    let dir = tempfile::tempdir().unwrap();
    a.write(&dir.path().join("a.vec")).unwrap();
    b.write(&dir.path().join("b.vec")).unwrap();
    assert_eq!(std::fs::read(dir.path().join("a.vec")).unwrap(), std::fs::read(dir.path().join("b.vec")).unwrap());
    let other = dive_on(&docs, &DiveTrainConfig { seed: 43, ..cfg });
    assert_ne!(a.word_vecs.as_slice(), other.word_vecs.as_slice());
}

#[test]
fn dive_preserves_context_inclusion() {
    let (docs, x, y) = nested_context_corpus(5);
    let dive = dive_on(&docs, &DiveTrainConfig { dims: 20, epochs: 3, ..Default::default() });
    let (xv, yv) = (dive.row(dive.id_of(&x).unwrap()), dive.row(dive.id_of(&y).unwrap()));
    let max = dive.word_vecs.as_slice().iter().copied().fold(0.0, f64::max);
    let included = xv.iter().zip(yv).filter(|(a, b)| **a <= **b + 0.01 * max).count();
    assert!(included as f64 >= 0.9 * xv.len() as f64, "{included}/{}", xv.len());
    // x must not pass by collapsing to zero
    let (sx, sy): (f64, f64) = (xv.iter().sum(), yv.iter().sum());
    assert!(sx > 0.1 * sy, "sum x {sx} sum y {sy}");
}

#[test]
fn sgns_separates_disjoint_groups() {
    let docs = two_topic_corpus(8, 400, 20, 4);
    let (vocab, stream) = encode(&docs);
    let cfg = SgnsConfig { dims: 16, epochs: 3, ..Default::default() };
    let dense = train_sgns(&stream, vocab.words(), &cfg).unwrap();
    let (within, across) = mean_cosines(|w| dense.vector(w).unwrap().to_vec(), 8);
    assert!(within > across + 0.3, "within {within} across {across}");
    let again = train_sgns(&stream, vocab.words(), &cfg).unwrap();
    assert_eq!(dense, again);
}

fn pseudo_setup() -> (Vec<Vec<String>>, Vec<usize>, Vocabulary, TokenStream, DiveEmbedding, DenseEmbedding) {
    // a0 lives only in topic-a documents and b0 only in topic-b documents
    let docs = two_topic_corpus(6, 600, 16, 12);
    let task = make_pseudoword_task(&docs, "a0", "b0", "ab", 200).unwrap();
    let (vocab, stream) = encode(&task.docs);
    let cooc = count_cooccurrences(&stream, 5, vocab.len()).unwrap();
    let dive = train_dive(&cooc, vocab.words(), &DiveTrainConfig { dims: 8, epochs: 3, ..Default::default() }).unwrap();
    let dense = train_sgns(&stream, vocab.words(), &SgnsConfig { dims: 16, epochs: 2, ..Default::default() }).unwrap();
    (task.docs.clone(), task.labels(), vocab, stream, dive, dense)
}

#[test]
fn pseudoword_senses_follow_the_source_words() {
    let (_, gold, vocab, stream, dive, dense) = pseudo_setup();
    let cfg = InduceConfig { n: 5, m: 50, exclude_query: true, ..Default::default() };
    let top = TopWords::build(&dive, cfg.n);
    let topics = TopicCache::build(&dive, &dense, cfg.m);
    let ind = induce(&dive, &top, &topics, "ab", &cfg).unwrap();
    assert_eq!(ind.model.len(), 2);
    let rcfg = RefineConfig {
        sentence_len: 16,
        iterations: 2,
        sgns: SgnsConfig { dims: 16, epochs: 2, ..Default::default() },
        ..Default::default()
    };
    let out = em_refine(&stream, vocab.words(), &[ind.model], &dense, &rcfg).unwrap();
    let purities: Vec<f64> = out.history.iter().map(|h| wsi_core::eval::pseudoword_purity(h, &gold).purity).collect();
    assert!(purities[0] >= 0.8, "{purities:?}");
    assert!(purities.windows(2).all(|p| p[1] >= p[0] - 1e-12), "{purities:?}");
}
