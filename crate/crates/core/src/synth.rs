//! Seeded synthetic data: a planted-vocabulary tweet corpus, tagged
//! sentences for both domains, a slang/standard parallel corpus and a small
//! affect lexicon. Real street-language corpora are not redistributable, so
//! these stand in for them in tests, benches and the bundled fixtures.

use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::affect::{AffectLexicon, AffectScores};
use crate::align::ParallelPair;
use crate::corpus::{Annotation, Category, Codebook, LabeledCorpus, Tweet};
use crate::postag::{Domain, TaggedSentence};
use crate::sampling::{self, Rng as SeededRng};

/// Class vocabulary as `(surface, tag)`.
const AGGRESSION: &[(&str, &str)] = &[
    ("opp", "N"),
    ("opps", "N"),
    ("smoke", "N"),
    ("slide", "V"),
    ("drill", "V"),
    ("pressure", "N"),
    ("beef", "N"),
    ("block", "N"),
];
const GRIEF: &[(&str, &str)] = &[
    ("rip", "V"),
    ("miss", "V"),
    ("gone", "A"),
    ("heaven", "N"),
    ("cry", "V"),
    ("hurt", "A"),
    ("fallen", "A"),
    ("angel", "N"),
];
const OTHER: &[(&str, &str)] = &[
    ("lol", "!"),
    ("food", "N"),
    ("game", "N"),
    ("party", "N"),
    ("shoes", "N"),
    ("music", "N"),
    ("school", "N"),
    ("fun", "A"),
];
const MARKERS: [&[(&str, &str)]; 3] = [
    &[("#gbe", "#"), ("#opps", "#"), ("😤", "E")],
    &[(":(", "E"), ("#ripbro", "#"), ("😢", "E")],
    &[(":)", "E"), ("😂", "E"), ("#weekend", "#")],
];
const FILLER: &[(&str, &str)] = &[
    ("i", "O"),
    ("u", "O"),
    ("da", "D"),
    ("on", "P"),
    ("dat", "D"),
    ("we", "O"),
    ("got", "V"),
    ("it", "O"),
    ("be", "V"),
    ("finna", "V"),
    ("bro", "N"),
    ("yall", "O"),
    ("ion", "V"),
    ("tryna", "V"),
    ("lil", "A"),
    ("fr", "R"),
];

/// Nonstandard surface to its standard gloss. Words missing here gloss to
/// themselves.
pub const SLANG: &[(&str, &str)] = &[
    ("opp", "enemy"),
    ("opps", "enemies"),
    ("smoke", "fight"),
    ("slide", "attack"),
    ("drill", "shoot"),
    ("pressure", "threat"),
    ("beef", "conflict"),
    ("block", "street"),
    ("rip", "dead"),
    ("lol", "laugh"),
    ("da", "the"),
    ("dat", "that"),
    ("u", "you"),
    ("yall", "you"),
    ("ion", "dont"),
    ("finna", "going"),
    ("tryna", "trying"),
    ("lil", "little"),
    ("fr", "really"),
    ("bro", "brother"),
    (":(", "sad"),
    (":)", "happy"),
    ("😂", "laugh"),
    ("😢", "sad"),
    ("😤", "angry"),
];

/// Standard-English words with tags, for source-domain sentences.
const STANDARD: &[(&str, &str)] = &[
    ("enemy", "N"),
    ("enemies", "N"),
    ("fight", "N"),
    ("attack", "V"),
    ("shoot", "V"),
    ("threat", "N"),
    ("conflict", "N"),
    ("street", "N"),
    ("dead", "A"),
    ("laugh", "V"),
    ("the", "D"),
    ("that", "D"),
    ("you", "O"),
    ("dont", "V"),
    ("going", "V"),
    ("trying", "V"),
    ("little", "A"),
    ("really", "R"),
    ("brother", "N"),
    ("to", "P"),
    ("we", "O"),
    ("it", "O"),
    ("i", "O"),
    ("miss", "V"),
    ("heaven", "N"),
    ("party", "N"),
    ("music", "N"),
];

const LEXICON: &[(&str, f64, f64, f64)] = &[
    ("angel", 2.6, 1.6, 2.6),
    ("angry", 1.1, 2.8, 1.8),
    ("attack", 1.1, 2.9, 2.0),
    ("brother", 2.4, 1.7, 2.6),
    ("conflict", 1.3, 2.4, 1.5),
    ("cry", 1.3, 2.0, 2.6),
    ("dead", 1.0, 1.4, 2.4),
    ("enemies", 1.2, 2.6, 1.8),
    ("enemy", 1.2, 2.6, 1.8),
    ("fallen", 1.4, 1.6, 2.0),
    ("fight", 1.3, 2.8, 2.2),
    ("food", 2.6, 1.9, 2.9),
    ("fun", 2.9, 2.6, 2.0),
    ("game", 2.5, 2.2, 2.4),
    ("gone", 1.3, 1.3, 1.6),
    ("happy", 3.0, 2.0, 2.0),
    ("heaven", 2.6, 1.4, 2.2),
    ("hurt", 1.1, 2.1, 1.9),
    ("laugh", 2.8, 2.4, 2.6),
    ("little", 2.0, 1.4, 2.0),
    ("miss", 1.4, 1.5, 1.4),
    ("music", 2.7, 2.2, 2.3),
    ("party", 2.8, 2.6, 2.6),
    ("sad", 1.0, 1.5, 2.0),
    ("school", 2.0, 1.9, 2.7),
    ("shoes", 2.2, 1.6, 2.9),
    ("shoot", 1.2, 2.9, 2.4),
    ("street", 2.0, 1.8, 2.8),
    ("threat", 1.2, 2.5, 1.6),
];

fn class_words(c: Category) -> &'static [(&'static str, &'static str)] {
    match c {
        Category::Aggression => AGGRESSION,
        Category::Grief => GRIEF,
        Category::Other => OTHER,
    }
}

pub fn gloss_of(word: &str) -> &str {
    SLANG.iter().find(|(s, _)| *s == word).map_or(word, |(_, g)| g)
}

/// Class prior of the planted corpus: other dominates, as in real data.
const PRIOR: [f64; 3] = [0.25, 0.25, 0.5];

fn draw_class(rng: &mut SeededRng) -> Category {
    let x: f64 = rng.gen();
    if x < PRIOR[0] {
        Category::Aggression
    } else if x < PRIOR[0] + PRIOR[1] {
        Category::Grief
    } else {
        Category::Other
    }
}

/// One tweet of class `c` as `(surface, tag)` pairs: two class words (each
/// swapped for another class's word with probability 0.1), two to five
/// fillers, and maybe a class marker, a mention and a link.
fn planted_tweet(c: Category, rng: &mut SeededRng, serial: usize) -> Vec<(String, &'static str)> {
    let mut out: Vec<(String, &'static str)> = Vec::new();
    for _ in 0..2 {
        let src = if rng.gen_bool(0.1) {
            *Category::ALL
                .iter()
                .filter(|x| **x != c)
                .collect::<Vec<_>>()
                .choose(rng)
                .unwrap()
        } else {
            &c
        };
        let (w, t) = class_words(*src).choose(rng).unwrap();
        out.push((w.to_string(), t));
    }
    for _ in 0..rng.gen_range(2..=5) {
        let (w, t) = FILLER.choose(rng).unwrap();
        out.push((w.to_string(), t));
    }
    if rng.gen_bool(0.5) {
        let (w, t) = MARKERS[c.index()].choose(rng).unwrap();
        out.push((w.to_string(), t));
    }
    if rng.gen_bool(0.2) {
        out.push((format!("@user{}", rng.gen_range(0..20)), "@"));
    }
    out.shuffle(rng);
    if rng.gen_bool(0.1) {
        out.push((format!("http://t.co/x{serial}"), "U"));
    }
    out
}

fn codes_for(codebook: &Codebook, c: Category) -> Vec<&str> {
    codebook
        .entries()
        .filter(|(_, cat)| *cat == c)
        .map(|(code, _)| code)
        .collect()
}

/// `n` tweets coded by three annotators. `a1` always codes the planted class;
/// `a2` and `a3` each code a different class 10% of the time.
pub fn planted_corpus(n: usize, seed: u64) -> LabeledCorpus {
    let codebook = Codebook::builtin();
    let mut rng = sampling::rng(seed);
    let start = Utc.with_ymd_and_hms(2014, 3, 1, 0, 0, 0).unwrap();
    let mut tweets = Vec::with_capacity(n);
    let mut annotations = Vec::with_capacity(3 * n);
    for i in 0..n {
        let c = draw_class(&mut rng);
        let words = planted_tweet(c, &mut rng, i);
        let id = format!("t{i:04}");
        tweets.push(Tweet {
            id: id.clone(),
            author: format!("author{}", rng.gen_range(0..8)),
            created_at: start + Duration::minutes(37 * i as i64),
            text: words.iter().map(|(w, _)| w.as_str()).collect::<Vec<_>>().join(" "),
            reply_to: (i > 0 && rng.gen_bool(0.1)).then(|| format!("t{:04}", rng.gen_range(0..i))),
        });
        for who in ["a1", "a2", "a3"] {
            let label = if who != "a1" && rng.gen_bool(0.1) {
                *Category::ALL
                    .iter()
                    .filter(|x| **x != c)
                    .collect::<Vec<_>>()
                    .choose(&mut rng)
                    .unwrap()
            } else {
                &c
            };
            let code = *codes_for(&codebook, *label).choose(&mut rng).unwrap();
            annotations.push(Annotation {
                tweet_id: id.clone(),
                annotator_id: who.to_string(),
                fine_code: code.to_string(),
                duvaa: None,
            });
        }
    }
    LabeledCorpus::new(tweets, annotations, codebook).expect("generator produces a valid corpus")
}

/// Hand-tagged tweets drawn from the same vocabulary as [`planted_corpus`].
pub fn tagged_tweets(n: usize, seed: u64) -> Vec<TaggedSentence> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|i| {
            let c = draw_class(&mut rng);
            let words = planted_tweet(c, &mut rng, i);
            let pairs: Vec<(&str, &str)> = words.iter().map(|(w, t)| (w.as_str(), *t)).collect();
            TaggedSentence::from_pairs(&pairs, Domain::Target).expect("valid tags")
        })
        .collect()
}

/// Standard-English sentences of three to seven words.
pub fn standard_sentences(n: usize, seed: u64) -> Vec<TaggedSentence> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(3..=7);
            let pairs: Vec<(&str, &str)> = (0..len).map(|_| *STANDARD.choose(&mut rng).unwrap()).collect();
            TaggedSentence::from_pairs(&pairs, Domain::Source).expect("valid tags")
        })
        .collect()
}

/// Tweet-like sentences paired with word-by-word standard glosses.
pub fn parallel_pairs(n: usize, seed: u64) -> Vec<ParallelPair> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|i| {
            let c = draw_class(&mut rng);
            let words: Vec<String> = planted_tweet(c, &mut rng, i)
                .into_iter()
                .map(|(w, _)| w)
                .filter(|w| !w.starts_with('@') && !w.starts_with("http"))
                .collect();
            let gloss: Vec<&str> = words.iter().map(|w| gloss_of(w)).collect();
            ParallelPair::new(&words, &gloss.iter().map(|g| g.to_string()).collect::<Vec<_>>()).expect("nonempty pair")
        })
        .collect()
}

/// Standard-English affect entries; no slang surface is listed.
pub fn lexicon() -> AffectLexicon {
    let mut lex = AffectLexicon::new();
    for (w, p, a, i) in LEXICON {
        lex.insert(
            w,
            AffectScores {
                pleasantness: *p,
                activation: *a,
                imagery: *i,
            },
        )
        .expect("fixture scores in range");
    }
    lex
}

/// The domain-shift tagging set. "blow" appears in the same short contexts
/// in both domains but is a verb in source sentences and a noun in target
/// ones, with source examples outnumbering target ones.
pub struct DomainShift {
    pub source: Vec<TaggedSentence>,
    pub target_train: Vec<TaggedSentence>,
    pub target_test: Vec<TaggedSentence>,
}

const BLOW_CONTEXTS: &[(&str, &str, &str, &str)] = &[
    ("i", "O", "it", "O"),
    ("they", "O", "up", "T"),
    ("we", "O", "dat", "D"),
    ("u", "O", "lol", "!"),
];

pub fn domain_shift(seed: u64) -> DomainShift {
    let mut rng = sampling::rng(seed);
    let blow = |domain: Domain, tag: &str, rng: &mut SeededRng| {
        let (a, at, b, bt) = *BLOW_CONTEXTS.choose(rng).unwrap();
        TaggedSentence::from_pairs(&[(a, at), ("blow", tag), (b, bt)], domain).expect("valid tags")
    };
    let mut source = Vec::new();
    for _ in 0..40 {
        source.push(blow(Domain::Source, "V", &mut rng));
    }
    let mut target_train = Vec::new();
    for _ in 0..10 {
        target_train.push(blow(Domain::Target, "N", &mut rng));
    }
    let target_test = (0..20).map(|_| blow(Domain::Target, "N", &mut rng)).collect();
    source.extend(standard_sentences(20, seed ^ 0x5eed));
    target_train.extend(tagged_tweets(10, seed ^ 0x7a9));
    DomainShift {
        source,
        target_train,
        target_test,
    }
}

const FIXTURE_CONFIG: &str = r#"# Synthetic fixture run. Paths are relative to this file.
[paths]
corpus = "corpus.jsonl"
corpus_format = "jsonl"
codebook = "codebook.tsv"
tagged_source = "tagged_source.tsv"
tagged_target = "tagged_target.tsv"
parallel = "parallel.tsv"
lexicon = "lexicon.tsv"
output_dir = "out"

[tagger]
epochs = 10
seed = 1
split = 0.2
augment = true

[aligner]
iterations = 10
threshold = 0.5
min_count = 2
use_null = true

[classifier]
lambda = 0.01
epochs = 50
seed = 1
affect_glossary = true

[eval]
test_ratio = 0.3
folds = 5
seed = 1
gold = "majority"
"#;

/// The bundled fixture set as `(file name, contents)`.
pub fn fixture_files() -> Vec<(&'static str, Vec<u8>)> {
    use crate::affect::write_lexicon;
    use crate::align::write_parallel;
    use crate::corpus::{write_corpus, CorpusFormat};
    use crate::postag::write_tagged;

    let mut corpus = Vec::new();
    write_corpus(&planted_corpus(150, 7), CorpusFormat::Jsonl, &mut corpus).expect("in-memory write");
    let mut source = Vec::new();
    write_tagged(&standard_sentences(60, 8), &mut source).expect("in-memory write");
    let mut target = Vec::new();
    write_tagged(&tagged_tweets(60, 9), &mut target).expect("in-memory write");
    let mut parallel = Vec::new();
    write_parallel(&parallel_pairs(300, 10), &mut parallel).expect("in-memory write");
    let mut lex = Vec::new();
    write_lexicon(&lexicon(), &mut lex).expect("in-memory write");
    vec![
        ("pipeline.toml", FIXTURE_CONFIG.as_bytes().to_vec()),
        ("corpus.jsonl", corpus),
        ("codebook.tsv", Codebook::builtin().to_tsv().into_bytes()),
        ("tagged_source.tsv", source),
        ("tagged_target.tsv", target),
        ("parallel.tsv", parallel),
        ("lexicon.tsv", lex),
    ]
}
