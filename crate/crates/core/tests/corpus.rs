use std::collections::HashMap;

use proptest::prelude::*;
use wsi_core::corpus::{
    build_vocabulary, count_cooccurrences, count_cooccurrences_sharded, tokenize, CooccurrenceTable, TokenStream,
    TokenizerRules, Vocabulary, OOV,
};

/// Every ordered pair of in-vocabulary positions at distance 1..=window.
fn brute_force(stream: &TokenStream, window: usize) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for doc in &stream.docs {
        for i in 0..doc.len() {
            for j in 0..doc.len() {
                let dist = i.abs_diff(j);
                if dist == 0 || dist > window || doc[i] == OOV || doc[j] == OOV {
                    continue;
                }
                *counts.entry((doc[i], doc[j])).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn as_map(table: &CooccurrenceTable) -> HashMap<(u32, u32), u64> {
    table.iter().map(|(w, c, n)| ((w, c), n)).collect()
}

fn stream_strategy() -> impl Strategy<Value = (TokenStream, usize)> {
    let token = prop_oneof![4 => 0u32..6, 1 => Just(OOV)];
    (prop::collection::vec(prop::collection::vec(token, 1..25), 1..6), 1usize..5)
        .prop_map(|(docs, window)| (TokenStream::new(docs), window))
}

proptest! {
    #[test]
    fn cooccurrence_matches_brute_force((stream, window) in stream_strategy()) {
        prop_assume!(stream.docs.iter().flatten().any(|&t| t != OOV));
        let table = count_cooccurrences(&stream, window, 6).unwrap();
        prop_assert_eq!(as_map(&table), brute_force(&stream, window));
        prop_assert!(table.is_symmetric());
        let totals: Vec<u64> = (0..6).map(|w| table.row(w).iter().map(|p| p.1).sum()).collect();
        prop_assert_eq!(table.word_totals(), &totals[..]);
        prop_assert!((table.z() - totals.iter().sum::<u64>() as f64 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sharding_does_not_change_counts((stream, window) in stream_strategy(), shards in 2usize..5) {
        prop_assume!(stream.docs.iter().flatten().any(|&t| t != OOV));
        let one = count_cooccurrences(&stream, window, 6).unwrap();
        let many = count_cooccurrences_sharded(&stream, window, 6, shards).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn vocabulary_counts_match_hash_map(words in prop::collection::vec("[a-e]{1,2}", 1..80), min_count in 1u64..4) {
        let mut oracle: HashMap<&str, u64> = HashMap::new();
        for w in &words {
            *oracle.entry(w.as_str()).or_default() += 1;
        }
        match build_vocabulary(&words, min_count) {
            Ok(vocab) => {
                let kept: Vec<(&str, u64)> = oracle.iter().filter(|e| *e.1 >= min_count).map(|(w, n)| (*w, *n)).collect();
                prop_assert_eq!(vocab.len(), kept.len());
                for (w, n) in kept {
                    let id = vocab.id_of(w).unwrap();
                    prop_assert_eq!(vocab.freq(id), n);
                }
                prop_assert!(vocab.frequencies().windows(2).all(|p| p[0] >= p[1]));
            }
            Err(_) => prop_assert!(oracle.values().all(|&n| n < min_count)),
        }
    }
}

#[test]
fn three_token_example() {
    let vocab = build_vocabulary(["a", "b", "a"], 1).unwrap();
    let stream = TokenStream::encode(&[vec!["a", "b", "a"]], &vocab);
    let t = count_cooccurrences(&stream, 1, vocab.len()).unwrap();
    let (a, b) = (vocab.id_of("a").unwrap(), vocab.id_of("b").unwrap());
    assert_eq!((t.count(a, b), t.count(b, a)), (2, 2));
    assert_eq!((t.word_total(a), t.word_total(b)), (2, 2));
    assert_eq!(t.z(), 2.0);
}

#[test]
fn tokenizer_lowercases_and_drops_stop_words() {
    let toks = tokenize("The Bank of the RIVER, 2018!".as_bytes(), &TokenizerRules::english()).unwrap();
    assert_eq!(toks, ["bank", "river"]);
    assert!(tokenize(&[0xff, 0xfe], &TokenizerRules::english()).is_err());
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = build_vocabulary("x y z x y x".split(' '), 1).unwrap();
    let path = dir.path().join("vocab.tsv");
    vocab.write_tsv(&path).unwrap();
    let back = Vocabulary::read_tsv(&path).unwrap();
    assert_eq!(back.words(), vocab.words());
    assert_eq!(back.frequencies(), vocab.frequencies());

    let stream = TokenStream::encode(&[vec!["x", "y", "z", "x"]], &vocab);
    let table = count_cooccurrences(&stream, 2, vocab.len()).unwrap();
    let path = dir.path().join("cooc.tsv");
    table.write_tsv(&path, &vocab).unwrap();
    assert_eq!(CooccurrenceTable::read_tsv(&path, &vocab).unwrap(), table);
}
