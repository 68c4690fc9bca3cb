//! IBM Model 1 alignment from tweet tokens to Standard English gloss tokens,
//! and glossary extraction from the learned translation table.
//!
//! The table holds `t(g | s)`: the probability of gloss token `g` given tweet
//! token `s`. EM starts from a uniform distribution over the gloss tokens
//! each source token co-occurs with. An optional NULL source token takes
//! part in every pair so that gloss words with no tweet counterpart have
//! somewhere to align.

mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use io::{read_glossary, read_parallel, read_table, write_glossary, write_parallel, write_table};

use crate::error::{Error, Result};

/// Reserved source token standing for "aligned to nothing".
pub const NULL_TOKEN: &str = "<null>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPair {
    source: Vec<String>,
    gloss: Vec<String>,
}

impl ParallelPair {
    /// Tokens are case-folded. Both sides must be nonempty.
    pub fn new<S: AsRef<str>>(source: &[S], gloss: &[S]) -> Result<Self> {
        if source.is_empty() || gloss.is_empty() {
            return Err(Error::invalid("parallel pair sides must be nonempty"));
        }
        let fold = |v: &[S]| -> Result<Vec<String>> {
            v.iter()
                .map(|s| {
                    let s = s.as_ref().to_lowercase();
                    if s.is_empty() || s.chars().any(char::is_whitespace) {
                        Err(Error::invalid(format!("bad token {s:?}")))
                    } else if s == NULL_TOKEN {
                        Err(Error::invalid(format!("{NULL_TOKEN} is reserved")))
                    } else {
                        Ok(s)
                    }
                })
                .collect()
        };
        Ok(ParallelPair {
            source: fold(source)?,
            gloss: fold(gloss)?,
        })
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn gloss(&self) -> &[String] {
        &self.gloss
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    probs: BTreeMap<String, BTreeMap<String, f64>>,
    source_counts: BTreeMap<String, usize>,
    use_null: bool,
    iterations_run: usize,
    log_likelihoods: Vec<f64>,
}

impl TranslationTable {
    pub fn prob(&self, gloss: &str, source: &str) -> f64 {
        self.probs
            .get(source)
            .and_then(|m| m.get(gloss))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn distribution(&self, source: &str) -> Option<&BTreeMap<String, f64>> {
        self.probs.get(source)
    }

    /// Source tokens with entries, including [`NULL_TOKEN`] when enabled.
    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    pub fn gloss_vocabulary(&self) -> BTreeSet<&str> {
        self.probs.values().flat_map(|m| m.keys().map(String::as_str)).collect()
    }

    /// Corpus frequency of a source token.
    pub fn source_count(&self, source: &str) -> usize {
        self.source_counts.get(source).copied().unwrap_or(0)
    }

    pub fn uses_null(&self) -> bool {
        self.use_null
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    /// Corpus log-likelihood before the first iteration and after each one,
    /// so `iterations_run + 1` entries for a freshly trained table. Empty
    /// for a table loaded from disk.
    pub fn log_likelihoods(&self) -> &[f64] {
        &self.log_likelihoods
    }
}

/// Vocabulary-indexed working form used during EM.
struct Indexed {
    source_vocab: Vec<String>,
    gloss_vocab: Vec<String>,
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

fn index_corpus(pairs: &[ParallelPair], use_null: bool) -> Indexed {
    fn intern(map: &mut HashMap<String, usize>, vocab: &mut Vec<String>, s: &str) -> usize {
        if let Some(&i) = map.get(s) {
            return i;
        }
        vocab.push(s.to_string());
        map.insert(s.to_string(), vocab.len() - 1);
        vocab.len() - 1
    }
    let mut src_map = HashMap::new();
    let mut gls_map = HashMap::new();
    let mut source_vocab = Vec::new();
    let mut gloss_vocab = Vec::new();
    let null = use_null.then(|| intern(&mut src_map, &mut source_vocab, NULL_TOKEN));
    let pairs = pairs
        .iter()
        .map(|p| {
            let mut s: Vec<usize> = p
                .source
                .iter()
                .map(|t| intern(&mut src_map, &mut source_vocab, t))
                .collect();
            s.extend(null);
            let g = p
                .gloss
                .iter()
                .map(|t| intern(&mut gls_map, &mut gloss_vocab, t))
                .collect();
            (s, g)
        })
        .collect();
    Indexed {
        source_vocab,
        gloss_vocab,
        pairs,
    }
}

/// Runs `iterations` rounds of Model 1 EM.
pub fn train_model1(pairs: &[ParallelPair], iterations: usize, use_null: bool) -> Result<TranslationTable> {
    if pairs.is_empty() {
        return Err(Error::Empty("parallel corpus"));
    }
    if iterations == 0 {
        return Err(Error::invalid("alignment iterations must be positive"));
    }
    let idx = index_corpus(pairs, use_null);
    let ns = idx.source_vocab.len();

    // t[s] maps gloss id -> probability; BTreeMap keeps every sum in a fixed order.
    let mut t: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); ns];
    for (s_ids, g_ids) in &idx.pairs {
        for &s in s_ids {
            for &g in g_ids {
                t[s].insert(g, 0.0);
            }
        }
    }
    for dist in &mut t {
        let u = 1.0 / dist.len() as f64;
        dist.values_mut().for_each(|p| *p = u);
    }

    let mut lls = Vec::with_capacity(iterations + 1);
    for _ in 0..iterations {
        let mut counts: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); ns];
        let mut ll = 0.0;
        for (s_ids, g_ids) in &idx.pairs {
            for &g in g_ids {
                let z: f64 = s_ids.iter().map(|&s| t[s][&g]).sum();
                ll += (z / s_ids.len() as f64).ln();
                for &s in s_ids {
                    *counts[s].entry(g).or_insert(0.0) += t[s][&g] / z;
                }
            }
        }
        lls.push(ll);
        for (s, c) in counts.into_iter().enumerate() {
            let total: f64 = c.values().sum();
            t[s] = c.into_iter().map(|(g, v)| (g, v / total)).collect();
        }
    }
    lls.push(log_likelihood(&idx, &t));

    let mut source_counts = BTreeMap::new();
    for p in pairs {
        for s in &p.source {
            *source_counts.entry(s.clone()).or_insert(0) += 1;
        }
    }
    let probs = t
        .into_iter()
        .enumerate()
        .map(|(s, dist)| {
            let named = dist.into_iter().map(|(g, p)| (idx.gloss_vocab[g].clone(), p)).collect();
            (idx.source_vocab[s].clone(), named)
        })
        .collect();
    Ok(TranslationTable {
        probs,
        source_counts,
        use_null,
        iterations_run: iterations,
        log_likelihoods: lls,
    })
}

/// `sum over pairs and gloss positions of ln( (1/|S|) * sum_s t(g|s) )`,
/// where `S` includes NULL when enabled. The length-prior constant is left
/// out; it does not depend on `t`.
fn log_likelihood(idx: &Indexed, t: &[BTreeMap<usize, f64>]) -> f64 {
    let mut ll = 0.0;
    for (s_ids, g_ids) in &idx.pairs {
        for &g in g_ids {
            let z: f64 = s_ids.iter().map(|&s| t[s][&g]).sum();
            ll += (z / s_ids.len() as f64).ln();
        }
    }
    ll
}

/// Where one gloss token aligns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub gloss: usize,
    /// Source position, or `None` for NULL.
    pub source: Option<usize>,
}

/// Best source position for every gloss token. Ties go to the lowest source
/// index; NULL (when the table uses it) is considered after all real
/// positions and must be strictly better to win.
pub fn viterbi_align(table: &TranslationTable, pair: &ParallelPair) -> Vec<Link> {
    pair.gloss
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut best = (Some(0), table.prob(g, &pair.source[0]));
            for (si, s) in pair.source.iter().enumerate().skip(1) {
                let p = table.prob(g, s);
                if p > best.1 {
                    best = (Some(si), p);
                }
            }
            if table.use_null {
                let p = table.prob(g, NULL_TOKEN);
                if p > best.1 {
                    best = (None, p);
                }
            }
            Link {
                gloss: gi,
                source: best.0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlossEntry {
    pub gloss: String,
    pub prob: f64,
}

/// Map from nonstandard tweet tokens to their most probable standard
/// equivalent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Glossary {
    entries: BTreeMap<String, GlossEntry>,
}

impl Glossary {
    pub fn from_entries<I: IntoIterator<Item = (String, GlossEntry)>>(entries: I) -> Self {
        Glossary {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, source: &str) -> Option<&GlossEntry> {
        self.entries.get(source)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &GlossEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One entry per source token whose best gloss reaches `threshold` and whose
/// corpus frequency is at least `min_count`. The best gloss is the argmax of
/// `t(. | s)` with ties going to the lexicographically smallest gloss. A
/// token whose best gloss is itself gets no entry.
pub fn extract_glossary(table: &TranslationTable, threshold: f64, min_count: usize) -> Result<Glossary> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!("glossary threshold {threshold} outside (0, 1]")));
    }
    let mut entries = BTreeMap::new();
    for (s, dist) in &table.probs {
        if s == NULL_TOKEN || table.source_count(s) < min_count {
            continue;
        }
        // BTreeMap iterates glosses in lexicographic order, so `>` keeps the smallest on ties.
        let mut best: Option<(&String, f64)> = None;
        for (g, &p) in dist {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((g, p));
            }
        }
        let Some((g, p)) = best else { continue };
        if g == s || p < threshold {
            continue;
        }
        entries.insert(
            s.clone(),
            GlossEntry {
                gloss: g.clone(),
                prob: p,
            },
        );
    }
    Ok(Glossary { entries })
}
