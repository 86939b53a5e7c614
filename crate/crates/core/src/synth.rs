//! Deterministic corpus generators.
//!
//! [`sample_corpus`] writes an English-like topical corpus: every document draws
//! its content words from one or two topics, and several words (`bank`, `rock`,
//! `star`, `apple`, ...) belong to two unrelated topics. The generator keeps the
//! topic membership so tests can build gold standards.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::eval::WcrQuery;
use crate::math::{derive_seed, seeded_rng, Rng};

pub struct Topic {
    pub name: &'static str,
    pub words: &'static [&'static str],
}

pub const TOPICS: &[Topic] = &[
    Topic { name: "music", words: &["music", "song", "band", "album", "guitar", "singer", "concert", "piano", "drum", "melody", "chord", "rhythm", "tour", "lyric", "studio", "rock", "jazz", "orchestra", "violin", "bass", "composer", "tune", "vocal", "opera", "festival", "key", "pitch", "record", "note", "stage"] },
    Topic { name: "geography", words: &["river", "mountain", "valley", "lake", "coast", "region", "plateau", "glacier", "hill", "peninsula", "island", "desert", "canyon", "border", "delta", "basin", "shore", "bank", "ridge", "summit", "terrain", "slope", "forest", "stream", "cliff", "spring", "latitude", "elevation", "highland", "map"] },
    Topic { name: "finance", words: &["money", "bank", "loan", "market", "interest", "deposit", "credit", "investor", "stock", "price", "tax", "income", "fund", "debt", "asset", "capital", "profit", "share", "currency", "payment", "account", "dividend", "budget", "mortgage", "inflation", "equity", "trader", "revenue", "exchange", "bond"] },
    Topic { name: "geology", words: &["rock", "mineral", "crystal", "lava", "sediment", "quartz", "granite", "fossil", "magma", "volcano", "erosion", "layer", "basalt", "limestone", "ore", "crust", "mantle", "earthquake", "fault", "sandstone", "shale", "geologist", "core", "stratum", "gem", "formation", "pebble", "boulder", "outcrop", "tectonic"] },
    Topic { name: "astronomy", words: &["star", "planet", "orbit", "galaxy", "telescope", "comet", "moon", "solar", "nebula", "asteroid", "cosmic", "sun", "gravity", "eclipse", "constellation", "mercury", "supernova", "meteor", "astronomer", "spectrum", "satellite", "universe", "cluster", "lunar", "observatory", "radiation", "dwarf", "quasar", "celestial", "light"] },
    Topic { name: "film", words: &["film", "actor", "director", "movie", "star", "scene", "role", "cinema", "premiere", "script", "hollywood", "drama", "comedy", "audience", "camera", "sequel", "cast", "award", "producer", "screenplay", "actress", "studio", "thriller", "documentary", "festival", "trailer", "character", "screen", "animation", "oscar"] },
    Topic { name: "food", words: &["food", "fruit", "apple", "vegetable", "meat", "potato", "bread", "cheese", "recipe", "kitchen", "soup", "salad", "butter", "sugar", "flavor", "dessert", "orange", "cake", "chef", "meal", "dinner", "pepper", "sauce", "grain", "juice", "tomato", "onion", "garlic", "pie", "bake"] },
    Topic { name: "computing", words: &["computer", "software", "program", "code", "server", "network", "data", "user", "apple", "memory", "processor", "mouse", "keyboard", "internet", "file", "database", "algorithm", "chip", "laptop", "virus", "python", "cloud", "download", "version", "release", "compiler", "browser", "developer", "core", "windows"] },
    Topic { name: "military", words: &["army", "soldier", "battle", "tank", "navy", "missile", "infantry", "weapon", "troop", "war", "aircraft", "officer", "regiment", "fleet", "attack", "defense", "artillery", "commander", "enemy", "marine", "fortress", "campaign", "sergeant", "battalion", "siege", "combat", "rifle", "armor", "general", "cavalry"] },
    Topic { name: "chemistry", words: &["acid", "carbon", "chemical", "oxygen", "zinc", "metal", "molecule", "compound", "atom", "element", "reactor", "gas", "tank", "pressure", "valve", "fuel", "plant", "steel", "cylinder", "pipe", "catalyst", "solvent", "hydrogen", "nitrogen", "mercury", "oxide", "laboratory", "reaction", "sulfur", "alloy"] },
    Topic { name: "sports", words: &["game", "team", "season", "league", "player", "coach", "match", "score", "goal", "championship", "stadium", "tournament", "cup", "race", "court", "pitch", "club", "win", "referee", "athlete", "medal", "olympic", "baseball", "football", "tennis", "fan", "trophy", "victory", "defeat", "draft"] },
    Topic { name: "automotive", words: &["car", "driver", "race", "wheel", "motor", "speed", "track", "vehicle", "jaguar", "brake", "garage", "highway", "truck", "sedan", "manufacturer", "model", "engine", "lap", "racing", "tire", "gear", "dealer", "convertible", "horsepower", "chassis", "mileage", "ford", "porsche", "rally", "fuel"] },
    Topic { name: "biology", words: &["cell", "gene", "protein", "organism", "species", "bacteria", "enzyme", "tissue", "membrane", "dna", "evolution", "leaf", "root", "seed", "flower", "plant", "chromosome", "mutation", "genome", "nucleus", "molecular", "biologist", "photosynthesis", "microbe", "metabolism", "embryo", "virus", "fungus", "algae", "trait"] },
    Topic { name: "animals", words: &["animal", "bird", "wolf", "eagle", "bear", "fish", "deer", "fox", "snake", "lion", "tiger", "nest", "feather", "hunt", "prey", "predator", "habitat", "wildlife", "owl", "mouse", "crane", "jaguar", "bass", "rabbit", "squirrel", "hawk", "zoo", "fur", "herd", "mammal"] },
    Topic { name: "law", words: &["court", "judge", "law", "trial", "lawyer", "jury", "verdict", "case", "crime", "prison", "sentence", "police", "evidence", "appeal", "attorney", "justice", "lawsuit", "defendant", "witness", "statute", "cell", "prosecutor", "testimony", "guilty", "legal", "ruling", "plaintiff", "convict", "bail", "charge"] },
    Topic { name: "medicine", words: &["patient", "doctor", "hospital", "symptom", "treatment", "disease", "nurse", "surgery", "blood", "vessel", "artery", "drug", "therapy", "clinic", "diagnosis", "infection", "heart", "tablet", "vaccine", "pain", "medicine", "cancer", "dose", "surgeon", "injury", "fever", "pharmacy", "chronic", "organ", "cure"] },
    Topic { name: "history", words: &["ancient", "empire", "emperor", "temple", "century", "dynasty", "king", "greek", "roman", "pharaoh", "ruin", "archaeology", "inscription", "kingdom", "medieval", "castle", "myth", "goddess", "zeus", "tablet", "tomb", "scroll", "relic", "conquest", "throne", "chronicle", "pyramid", "legion", "artifact", "crown"] },
    Topic { name: "construction", words: &["building", "house", "crane", "tower", "bridge", "concrete", "brick", "architect", "construction", "wall", "roof", "floor", "beam", "foundation", "builder", "site", "scaffold", "palace", "contractor", "cement", "timber", "plumbing", "renovation", "blueprint", "carpenter", "tile", "elevator", "skyscraper", "hammer", "plank"] },
    Topic { name: "education", words: &["school", "student", "teacher", "university", "course", "class", "exam", "lesson", "degree", "campus", "curriculum", "grade", "professor", "lecture", "homework", "college", "core", "tuition", "semester", "graduate", "classroom", "scholarship", "diploma", "faculty", "syllabus", "academic", "pupil", "enrollment", "textbook", "quiz"] },
    Topic { name: "weather", words: &["rain", "snow", "storm", "wind", "cloud", "temperature", "climate", "winter", "summer", "frost", "weather", "forecast", "thunder", "humid", "autumn", "sunshine", "spring", "breeze", "hail", "drought", "flood", "tornado", "fog", "rainfall", "monsoon", "hurricane", "blizzard", "heatwave", "drizzle", "mild"] },
    Topic { name: "politics", words: &["government", "election", "vote", "party", "president", "minister", "parliament", "policy", "senator", "state", "country", "democracy", "congress", "citizen", "reform", "candidate", "ballot", "legislation", "cabinet", "governor", "diplomat", "treaty", "republic", "opposition", "coalition", "mayor", "referendum", "constitution", "campaign", "bill"] },
    Topic { name: "literature", words: &["book", "novel", "author", "poem", "poet", "chapter", "publish", "edition", "story", "reader", "fiction", "literary", "writer", "page", "library", "manuscript", "novelist", "publisher", "verse", "prose", "narrative", "essay", "anthology", "biography", "sonnet", "plot", "memoir", "critic", "bestseller", "character"] },
    Topic { name: "ocean", words: &["sea", "ocean", "boat", "fishing", "harbor", "wave", "sailor", "ship", "tide", "coral", "whale", "shark", "anchor", "port", "voyage", "vessel", "fisherman", "reef", "dolphin", "sail", "captain", "deck", "yacht", "lighthouse", "seafood", "bass", "net", "crew", "bay", "bank"] },
    Topic { name: "telecom", words: &["phone", "mobile", "signal", "call", "wireless", "antenna", "carrier", "message", "battery", "radio", "broadband", "cell", "tower", "subscriber", "bandwidth", "smartphone", "modem", "fiber", "operator", "handset", "roaming", "satellite", "transmitter", "dial", "texting", "voicemail", "frequency", "router", "coverage", "network"] },
];

/// Topic-neutral content words mixed into every document.
pub const GENERAL: &[&str] = &[
    "time", "year", "people", "way", "day", "part", "place", "world", "life", "number", "group",
    "area", "work", "system", "point", "use", "make", "new", "first", "large", "small", "early",
    "late", "include", "show", "develop", "know", "take", "see", "come", "good", "great", "high",
    "long", "old", "different", "important", "public", "local", "major", "common", "second",
    "begin", "continue", "example", "form", "result", "change", "level", "member", "period",
    "process", "history", "order", "series", "line", "family", "name", "end", "report",
];

/// Stop words emitted into raw text so tokenization has something to remove.
const FILLER: &[&str] = &[
    "the", "of", "and", "a", "in", "to", "is", "was", "for", "on", "with", "as", "by", "at",
    "from", "that", "it", "this", "which", "be", "are", "were", "an", "also", "their", "has",
];

/// Indexes into [`TOPICS`] of the topics containing `word`.
pub fn topics_of(word: &str) -> Vec<usize> {
    TOPICS
        .iter()
        .enumerate()
        .filter(|(_, t)| t.words.contains(&word))
        .map(|(i, _)| i)
        .collect()
}

/// Words listed under two or more topics.
pub fn polysemous_words() -> Vec<&'static str> {
    let mut all: BTreeSet<&'static str> = BTreeSet::new();
    for t in TOPICS {
        for w in t.words {
            if topics_of(w).len() > 1 {
                all.insert(w);
            }
        }
    }
    all.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct SampleCorpusConfig {
    /// Approximate number of raw (pre-tokenization) tokens.
    pub tokens: usize,
    pub seed: u64,
    /// Probability that a document mixes in a second topic.
    pub secondary_topic_prob: f64,
    pub general_share: f64,
    pub filler_share: f64,
}

impl Default for SampleCorpusConfig {
    fn default() -> Self {
        SampleCorpusConfig {
            tokens: 1_000_000,
            seed: 2018,
            secondary_topic_prob: 0.25,
            general_share: 0.15,
            filler_share: 0.3,
        }
    }
}

fn zipf(n: usize) -> WeightedAliasIndex<f64> {
    WeightedAliasIndex::new((0..n).map(|r| 1.0 / (r as f64 + 1.5)).collect()).expect("non-empty zipf")
}

struct Generator {
    rng: Rng,
    topic_zipf: WeightedAliasIndex<f64>,
    general_zipf: WeightedAliasIndex<f64>,
}

impl Generator {
    fn topic_word(&mut self, topic: usize) -> &'static str {
        let words = TOPICS[topic].words;
        words[self.topic_zipf.sample(&mut self.rng) % words.len()]
    }
}

/// Generates the sample corpus: one document per line, sentences with
/// capitalization and punctuation, stop words included.
pub fn sample_corpus(cfg: &SampleCorpusConfig) -> String {
    let mut g = Generator {
        rng: seeded_rng(derive_seed(cfg.seed, 0x5A)),
        topic_zipf: zipf(30),
        general_zipf: zipf(GENERAL.len()),
    };
    let mut out = String::with_capacity(cfg.tokens * 8);
    let mut emitted = 0usize;
    while emitted < cfg.tokens {
        let primary = g.rng.random_range(0..TOPICS.len());
        let secondary = if g.rng.random::<f64>() < cfg.secondary_topic_prob {
            let s = g.rng.random_range(0..TOPICS.len() - 1);
            Some(if s >= primary { s + 1 } else { s })
        } else {
            None
        };
        let sentences = g.rng.random_range(3..9);
        for s in 0..sentences {
            let len = g.rng.random_range(6..17);
            for i in 0..len {
                let r: f64 = g.rng.random();
                let word = if r < cfg.filler_share {
                    *FILLER.choose(&mut g.rng).expect("filler")
                } else if r < cfg.filler_share + cfg.general_share {
                    GENERAL[g.general_zipf.sample(&mut g.rng)]
                } else {
                    let topic = match secondary {
                        Some(t) if g.rng.random::<f64>() < 0.3 => t,
                        _ => primary,
                    };
                    g.topic_word(topic)
                };
                if i == 0 {
                    if s > 0 {
                        out.push(' ');
                    }
                    let mut cs = word.chars();
                    let first = cs.next().expect("non-empty word");
                    out.extend(first.to_uppercase());
                    out.push_str(cs.as_str());
                } else {
                    if g.rng.random::<f64>() < 0.05 {
                        out.push(',');
                    }
                    out.push(' ');
                    out.push_str(word);
                }
            }
            out.push('.');
            emitted += len;
        }
        out.push('\n');
    }
    out
}

/// Two disjoint groups of `group_size` words (`a0..`, `b0..`); each document uses one group only.
pub fn two_topic_corpus(group_size: usize, docs: usize, doc_len: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = seeded_rng(derive_seed(seed, 0x77));
    (0..docs)
        .map(|d| {
            let prefix = if d % 2 == 0 { "a" } else { "b" };
            (0..doc_len)
                .map(|_| format!("{prefix}{}", rng.random_range(0..group_size)))
                .collect()
        })
        .collect()
}

/// A corpus in which the contexts of `x` are included in the contexts of `y`:
/// every document mentioning `x` appears twice more with `x` replaced by `y`,
/// and `y` also has documents of its own. A large background topic keeps the
/// mean word count low enough that `x` gets a nonzero vector. Returns `(docs, x, y)`.
pub fn nested_context_corpus(seed: u64) -> (Vec<Vec<String>>, String, String) {
    let mut rng = seeded_rng(derive_seed(seed, 0x99));
    let topic_a: Vec<String> = (0..12).map(|i| format!("a{i}")).collect();
    let topic_b: Vec<String> = (0..12).map(|i| format!("b{i}")).collect();
    let topic_c: Vec<String> = (0..300).map(|i| format!("c{i}")).collect();
    let mut docs = Vec::new();
    let doc_with = |rng: &mut Rng, pool: &[String], mention: Option<&str>| {
        let len = 16;
        let mut d: Vec<String> = (0..len).map(|_| pool.choose(rng).expect("pool").clone()).collect();
        if let Some(m) = mention {
            let at = rng.random_range(0..len);
            d[at] = m.to_string();
        }
        d
    };
    for _ in 0..600 {
        let d = doc_with(&mut rng, &topic_a, Some("x"));
        let copy: Vec<String> = d.iter().map(|t| if t == "x" { "y".to_string() } else { t.clone() }).collect();
        docs.push(d);
        docs.push(copy.clone());
        docs.push(copy);
    }
    for _ in 0..600 {
        docs.push(doc_with(&mut rng, &topic_b, Some("y")));
    }
    for _ in 0..600 {
        docs.push(doc_with(&mut rng, &topic_c, None));
    }
    (docs, "x".to_string(), "y".to_string())
}

/// Context-relevance queries, one per (polysemous target, topic) pair. True contexts are drawn from
/// the target's topic; false contexts from topics that do not contain it.
pub fn synthetic_wcr_queries(targets: &[&str], context_len: usize, seed: u64) -> Vec<WcrQuery> {
    let mut rng = seeded_rng(derive_seed(seed, 0x3C));
    let draw = |rng: &mut Rng, topic: usize, exclude: &str| -> Vec<String> {
        let pool: Vec<&str> = TOPICS[topic]
            .words
            .iter()
            .copied()
            .filter(|w| *w != exclude)
            .collect();
        pool.choose_multiple(rng, context_len).map(|s| s.to_string()).collect()
    };
    let mut queries = Vec::new();
    for &target in targets {
        let own = topics_of(target);
        let others: Vec<usize> = (0..TOPICS.len()).filter(|t| !own.contains(t)).collect();
        for &t in &own {
            let true_context = draw(&mut rng, t, target);
            let false_contexts = (0..10)
                .map(|_| {
                    let ft = *others.choose(&mut rng).expect("other topics");
                    draw(&mut rng, ft, target)
                })
                .collect();
            queries.push(WcrQuery {
                target: target.to_string(),
                true_context,
                false_contexts,
            });
        }
    }
    queries
}
