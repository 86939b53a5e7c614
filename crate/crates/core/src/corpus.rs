//! Tokenization, vocabulary construction and sliding-window co-occurrence counts.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::{BuildHasherDefault, Hasher};
use std::path::Path;

use crate::{Error, Result};

/// Tokenizer configuration: lowercased alphabetic runs minus a stop list.
#[derive(Debug, Clone)]
pub struct TokenizerRules {
    stopwords: HashSet<String>,
}

impl TokenizerRules {
    pub fn english() -> Self {
        Self::with_stopwords(crate::stopwords::ENGLISH.iter().copied())
    }

    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TokenizerRules {
            stopwords: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn no_stopwords() -> Self {
        TokenizerRules {
            stopwords: HashSet::new(),
        }
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

impl Default for TokenizerRules {
    fn default() -> Self {
        Self::english()
    }
}

fn decode(raw: &[u8]) -> Result<&str> {
    std::str::from_utf8(raw).map_err(|e| Error::InvalidEncoding {
        position: e.valid_up_to(),
    })
}

fn tokenize_str(text: &str, rules: &TokenizerRules, out: &mut Vec<String>) {
    for piece in text.split(|c: char| !c.is_alphabetic()) {
        if piece.is_empty() {
            continue;
        }
        let token = piece.to_lowercase();
        if !rules.is_stopword(&token) {
            out.push(token);
        }
    }
}

/// Splits UTF-8 text into lowercased alphabetic tokens, dropping stop words.
pub fn tokenize(raw: &[u8], rules: &TokenizerRules) -> Result<Vec<String>> {
    let text = decode(raw)?;
    let mut out = Vec::new();
    tokenize_str(text, rules, &mut out);
    Ok(out)
}

/// Like [`tokenize`], but every non-empty line is a separate document.
/// Co-occurrence windows never cross document boundaries.
pub fn tokenize_documents(raw: &[u8], rules: &TokenizerRules) -> Result<Vec<Vec<String>>> {
    let text = decode(raw)?;
    let mut docs = Vec::new();
    for line in text.lines() {
        let mut doc = Vec::new();
        tokenize_str(line, rules, &mut doc);
        if !doc.is_empty() {
            docs.push(doc);
        }
    }
    Ok(docs)
}

/// Word ↔ id mapping with corpus frequencies. Ids are dense and ordered by
/// descending frequency, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    freq: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from `(word, frequency)` pairs, dropping words under `min_count`.
    pub fn from_counts<I>(counts: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        if min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        let mut kept: Vec<(String, u64)> =
            counts.into_iter().filter(|(_, f)| *f >= min_count).collect();
        if kept.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, freq): (Vec<String>, Vec<u64>) = kept.into_iter().unzip();
        Ok(Self::from_parts(words, freq, min_count))
    }

    fn from_parts(words: Vec<String>, freq: Vec<u64>, min_count: u64) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            index,
            freq,
            min_count,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn freq(&self, id: u32) -> u64 {
        self.freq[id as usize]
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.freq
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Writes `word<TAB>freq` lines in id order.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (w, f) in self.words.iter().zip(&self.freq) {
            writeln!(out, "{w}\t{f}").unwrap();
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut words = Vec::new();
        let mut freq = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let (w, f) = line
                .split_once('\t')
                .ok_or_else(|| Error::schema(path, lineno, "expected `word<TAB>freq`"))?;
            let f: u64 = f
                .parse()
                .map_err(|_| Error::schema(path, lineno, format!("bad frequency `{f}`")))?;
            if w.is_empty() || !seen.insert(w.to_string()) {
                return Err(Error::schema(path, lineno, format!("empty or duplicate word `{w}`")));
            }
            if let Some(&prev) = freq.last() {
                if f > prev {
                    return Err(Error::schema(path, lineno, "frequencies must be non-increasing"));
                }
            }
            words.push(w.to_string());
            freq.push(f);
        }
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let min_count = freq.last().copied().unwrap_or(1).max(1);
        Ok(Self::from_parts(words, freq, min_count))
    }
}

/// Counts tokens and builds a [`Vocabulary`].
pub fn build_vocabulary<I, S>(tokens: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_ref().to_string()).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::from_counts(counts, min_count)
}

/// Sentinel id for tokens outside the vocabulary. They keep their position so
/// window distances are preserved.
pub const OOV: u32 = u32::MAX;

/// A corpus as documents of word ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub docs: Vec<Vec<u32>>,
}

impl TokenStream {
    pub fn new(docs: Vec<Vec<u32>>) -> Self {
        TokenStream { docs }
    }

    pub fn encode<S: AsRef<str>>(docs: &[Vec<S>], vocab: &Vocabulary) -> Self {
        let docs = docs
            .iter()
            .map(|d| {
                d.iter()
                    .map(|t| vocab.id_of(t.as_ref()).unwrap_or(OOV))
                    .collect()
            })
            .collect();
        TokenStream { docs }
    }

    /// Number of positions, out-of-vocabulary slots included.
    pub fn len(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Splits every document into consecutive chunks of at most `len` positions.
    pub fn chunked(&self, len: usize) -> TokenStream {
        assert!(len > 0, "chunk length must be positive");
        let docs = self
            .docs
            .iter()
            .flat_map(|d| d.chunks(len).map(<[u32]>::to_vec))
            .collect();
        TokenStream { docs }
    }

    /// Per-id occurrence counts over `vocab_size` ids.
    pub fn counts(&self, vocab_size: usize) -> Vec<u64> {
        let mut c = vec![0u64; vocab_size];
        for &t in self.docs.iter().flatten() {
            if t != OOV {
                c[t as usize] += 1;
            }
        }
        c
    }
}

#[derive(Default)]
struct PairHasher(u64);

impl Hasher for PairHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(5) ^ v).wrapping_mul(0x51_7C_C1_B7_27_22_0A_95);
    }
}

type PairMap = HashMap<u64, u64, BuildHasherDefault<PairHasher>>;

#[inline]
fn pair_key(w: u32, c: u32) -> u64 {
    ((w as u64) << 32) | c as u64
}

/// Sparse symmetric co-occurrence counts `#(w,c)` in CSR layout, with `#(w)` and `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceTable {
    vocab_size: usize,
    window: usize,
    row_offsets: Vec<usize>,
    entries: Vec<(u32, u64)>,
    word_totals: Vec<u64>,
    z: f64,
}

impl CooccurrenceTable {
    /// Builds a table from `(word, context, count)` triplets; duplicates are summed.
    pub fn from_triplets<I>(vocab_size: usize, window: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, u64)>,
    {
        if vocab_size == 0 {
            return Err(Error::EmptyVocabulary);
        }
        let mut map = PairMap::default();
        for (w, c, n) in triplets {
            if w as usize >= vocab_size || c as usize >= vocab_size {
                return Err(Error::ContractViolation(format!(
                    "pair ({w}, {c}) outside vocabulary of size {vocab_size}"
                )));
            }
            if n > 0 {
                *map.entry(pair_key(w, c)).or_default() += n;
            }
        }
        Ok(Self::from_map(vocab_size, window, map))
    }

    fn from_map(vocab_size: usize, window: usize, map: PairMap) -> Self {
        let mut pairs: Vec<(u64, u64)> = map.into_iter().collect();
        pairs.sort_unstable_by_key(|p| p.0);
        let mut row_offsets = vec![0usize; vocab_size + 1];
        let mut word_totals = vec![0u64; vocab_size];
        let mut entries = Vec::with_capacity(pairs.len());
        for (key, n) in pairs {
            let w = (key >> 32) as usize;
            let c = (key & 0xFFFF_FFFF) as u32;
            row_offsets[w + 1] += 1;
            word_totals[w] += n;
            entries.push((c, n));
        }
        for i in 0..vocab_size {
            row_offsets[i + 1] += row_offsets[i];
        }
        let z = word_totals.iter().sum::<u64>() as f64 / vocab_size as f64;
        CooccurrenceTable {
            vocab_size,
            window,
            row_offsets,
            entries,
            word_totals,
            z,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of stored nonzero pairs.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `Σ_{w,c} #(w,c)`.
    pub fn total(&self) -> u64 {
        self.word_totals.iter().sum()
    }

    /// Nonzero `(context, count)` entries of row `w`, sorted by context.
    pub fn row(&self, w: u32) -> &[(u32, u64)] {
        let w = w as usize;
        &self.entries[self.row_offsets[w]..self.row_offsets[w + 1]]
    }

    pub fn count(&self, w: u32, c: u32) -> u64 {
        let row = self.row(w);
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    /// `#(w) = Σ_c #(w,c)`.
    pub fn word_total(&self, w: u32) -> u64 {
        self.word_totals[w as usize]
    }

    pub fn word_totals(&self) -> &[u64] {
        &self.word_totals
    }

    /// `Z`, the mean of `#(w)` over the vocabulary.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        (0..self.vocab_size as u32).flat_map(move |w| self.row(w).iter().map(move |&(c, n)| (w, c, n)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(w, c, n)| self.count(c, w) == n)
    }

    /// Sums two tables over the same vocabulary.
    pub fn merge(&self, other: &CooccurrenceTable) -> Result<CooccurrenceTable> {
        if self.vocab_size != other.vocab_size || self.window != other.window {
            return Err(Error::ContractViolation(
                "merging tables with different vocabulary or window".into(),
            ));
        }
        Self::from_triplets(self.vocab_size, self.window, self.iter().chain(other.iter()))
    }

    /// Writes the `#cooc v1` TSV format.
    pub fn write_tsv(&self, path: &Path, vocab: &Vocabulary) -> Result<()> {
        let mut out = String::with_capacity(self.nnz() * 24);
        writeln!(out, "#cooc v1 {} {}", self.vocab_size, self.window).unwrap();
        for (w, c, n) in self.iter() {
            writeln!(out, "{}\t{}\t{}", vocab.word(w), vocab.word(c), n).unwrap();
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path, vocab: &Vocabulary) -> Result<CooccurrenceTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::schema(path, 1, "missing `#cooc v1` header"))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 || fields[0] != "#cooc" || fields[1] != "v1" {
            return Err(Error::schema(path, 1, "expected `#cooc v1 <|V|> <window>`"));
        }
        let vsize: usize = fields[2]
            .parse()
            .map_err(|_| Error::schema(path, 1, "bad vocabulary size"))?;
        let window: usize = fields[3]
            .parse()
            .map_err(|_| Error::schema(path, 1, "bad window"))?;
        if vsize != vocab.len() {
            return Err(Error::schema(
                path,
                1,
                format!("table has |V|={vsize} but vocabulary has {}", vocab.len()),
            ));
        }
        let mut triplets = Vec::new();
        let mut last_line = 1;
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            last_line = lineno;
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(Error::schema(path, lineno, "expected `word<TAB>context<TAB>count`"));
            }
            let lookup = |w: &str| {
                vocab
                    .id_of(w)
                    .ok_or_else(|| Error::schema(path, lineno, format!("unknown word `{w}`")))
            };
            let w = lookup(parts[0])?;
            let c = lookup(parts[1])?;
            let n: u64 = parts[2]
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::schema(path, lineno, format!("bad count `{}`", parts[2])))?;
            triplets.push((w, c, n));
        }
        let table = Self::from_triplets(vsize, window, triplets)?;
        if !table.is_symmetric() {
            return Err(Error::schema(path, last_line + 1, "table is not symmetric (truncated?)"));
        }
        Ok(table)
    }
}

fn count_into(map: &mut PairMap, docs: &[Vec<u32>], window: usize) {
    for doc in docs {
        for (i, &w) in doc.iter().enumerate() {
            if w == OOV {
                continue;
            }
            for &c in doc.iter().skip(i + 1).take(window) {
                if c == OOV {
                    continue;
                }
                *map.entry(pair_key(w, c)).or_default() += 1;
                *map.entry(pair_key(c, w)).or_default() += 1;
            }
        }
    }
}

/// Counts symmetric window co-occurrences: every in-vocabulary token at distance
/// `1..=window` on either side adds one to `#(w,c)`.
pub fn count_cooccurrences(
    stream: &TokenStream,
    window: usize,
    vocab_size: usize,
) -> Result<CooccurrenceTable> {
    count_cooccurrences_sharded(stream, window, vocab_size, 1)
}

/// Sharded variant of [`count_cooccurrences`]; shard tables are merged by summation
/// so the result does not depend on `shards`.
pub fn count_cooccurrences_sharded(
    stream: &TokenStream,
    window: usize,
    vocab_size: usize,
    shards: usize,
) -> Result<CooccurrenceTable> {
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    if stream.is_empty() {
        return Err(Error::EmptyInput("token stream"));
    }
    if vocab_size == 0 {
        return Err(Error::EmptyVocabulary);
    }
    if let Some(&bad) = stream
        .docs
        .iter()
        .flatten()
        .find(|&&t| t != OOV && t as usize >= vocab_size)
    {
        return Err(Error::ContractViolation(format!("token id {bad} outside vocabulary")));
    }
    let shards = shards.max(1).min(stream.docs.len().max(1));
    let map = if shards == 1 {
        let mut map = PairMap::default();
        count_into(&mut map, &stream.docs, window);
        map
    } else {
        let per = stream.docs.len().div_ceil(shards);
        let parts: Vec<PairMap> = std::thread::scope(|s| {
            let handles: Vec<_> = stream
                .docs
                .chunks(per)
                .map(|chunk| {
                    s.spawn(move || {
                        let mut map = PairMap::default();
                        count_into(&mut map, chunk, window);
                        map
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("counting shard panicked")).collect()
        });
        let mut merged = PairMap::default();
        for part in parts {
            for (k, n) in part {
                *merged.entry(k).or_default() += n;
            }
        }
        merged
    };
    Ok(CooccurrenceTable::from_map(vocab_size, window, map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> TokenStream {
        TokenStream::new(vec![v.to_vec()])
    }

    #[test]
    fn tokenize_drops_stopwords_and_punctuation() {
        let rules = TokenizerRules::english();
        assert_eq!(tokenize(b"The cat sat.", &rules).unwrap(), vec!["cat", "sat"]);
        assert!(tokenize(b"", &rules).unwrap().is_empty());
    }

    #[test]
    fn tokenize_rejects_bad_utf8_with_position() {
        let err = tokenize(b"good \xff bad", &TokenizerRules::english()).unwrap_err();
        assert!(matches!(err, Error::InvalidEncoding { position: 5 }));
    }

    #[test]
    fn documents_are_lines() {
        let docs = tokenize_documents(b"Rock music.\n\nRiver bank\n", &TokenizerRules::english()).unwrap();
        assert_eq!(docs, vec![vec!["rock", "music"], vec!["river", "bank"]]);
    }

    #[test]
    fn vocabulary_orders_by_frequency_then_word() {
        let v = build_vocabulary(["a", "b", "a"], 1).unwrap();
        assert_eq!(v.words(), &["a", "b"]);
        assert_eq!(v.freq(0), 2);
        assert_eq!(v.freq(1), 1);
        let v = build_vocabulary(["a", "b", "a"], 2).unwrap();
        assert_eq!(v.words(), &["a"]);
        let v = build_vocabulary(["z", "y", "x", "y", "z"], 1).unwrap();
        assert_eq!(v.words(), &["y", "z", "x"]);
    }

    #[test]
    fn vocabulary_errors() {
        assert!(matches!(
            build_vocabulary(Vec::<String>::new(), 1),
            Err(Error::EmptyVocabulary)
        ));
        assert!(matches!(build_vocabulary(["a"], 0), Err(Error::Config(_))));
        assert!(matches!(build_vocabulary(["a"], 2), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn three_token_window_one() {
        // a=0, b=1
        let t = count_cooccurrences(&ids(&[0, 1, 0]), 1, 2).unwrap();
        assert_eq!(t.count(0, 1), 2);
        assert_eq!(t.count(1, 0), 2);
        assert_eq!(t.count(0, 0), 0);
        assert_eq!(t.word_total(0), 2);
        assert_eq!(t.word_total(1), 2);
        assert_eq!(t.z(), 2.0);
    }

    #[test]
    fn single_token_has_no_pairs() {
        let t = count_cooccurrences(&ids(&[0]), 5, 1).unwrap();
        assert_eq!(t.nnz(), 0);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn oov_keeps_distance() {
        // 0 OOV 1 with window 1: no pair; window 2: one pair each direction
        let s = ids(&[0, OOV, 1]);
        assert_eq!(count_cooccurrences(&s, 1, 2).unwrap().nnz(), 0);
        let t = count_cooccurrences(&s, 2, 2).unwrap();
        assert_eq!(t.count(0, 1), 1);
        assert_eq!(t.count(1, 0), 1);
    }

    #[test]
    fn windows_do_not_cross_documents() {
        let s = TokenStream::new(vec![vec![0], vec![1]]);
        assert_eq!(count_cooccurrences(&s, 3, 2).unwrap().nnz(), 0);
    }

    #[test]
    fn empty_stream_and_zero_window_rejected() {
        assert!(count_cooccurrences(&TokenStream::default(), 1, 1).is_err());
        assert!(count_cooccurrences(&ids(&[0]), 0, 1).is_err());
    }

    #[test]
    fn chunking_preserves_positions() {
        let s = TokenStream::new(vec![(0..45).collect(), vec![7; 3]]);
        let c = s.chunked(20);
        assert_eq!(c.docs.len(), 4);
        assert_eq!(c.docs[2].len(), 5);
        assert_eq!(c.len(), s.len());
    }

    #[test]
    fn truncated_cooc_file_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let vocab = build_vocabulary(["a", "b", "a", "c"], 1).unwrap();
        let s = TokenStream::new(vec![vec![0, 1, 0, 2]]);
        let t = count_cooccurrences(&s, 2, vocab.len()).unwrap();
        let path = dir.path().join("cooc.tsv");
        t.write_tsv(&path, &vocab).unwrap();
        assert_eq!(CooccurrenceTable::read_tsv(&path, &vocab).unwrap(), t);

        let text = std::fs::read_to_string(&path).unwrap();
        let cut = &text[..text.len() - 3];
        std::fs::write(&path, cut).unwrap();
        let err = CooccurrenceTable::read_tsv(&path, &vocab).unwrap_err();
        match err {
            Error::Schema { line, .. } => assert_eq!(line, text.lines().count()),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn vocabulary_tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let v = build_vocabulary(["x", "y", "x", "z", "x", "y"], 1).unwrap();
        let path = dir.path().join("vocab.tsv");
        v.write_tsv(&path).unwrap();
        let back = Vocabulary::read_tsv(&path).unwrap();
        assert_eq!(back.words(), v.words());
        assert_eq!(back.frequencies(), v.frequencies());
        std::fs::write(&path, "x\t3\ny\tfoo\n").unwrap();
        assert!(matches!(Vocabulary::read_tsv(&path), Err(Error::Schema { line: 2, .. })));
    }
}
