//! Part-of-speech tagging over the 25-tag tweet tagset.
//!
//! An averaged perceptron with greedy left-to-right decoding. Every feature
//! is passed through [`augment`] before scoring, which gives each feature a
//! shared copy and a copy private to the sentence's domain. Training on a
//! general-tweet source corpus together with a small target corpus then lets
//! the target-specific copies override the shared weights where the domains
//! disagree.

mod io;
mod perceptron;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use io::{read_model, read_tagged, write_model, write_tagged};
pub use perceptron::train_tagger;

use crate::corpus::Token;
use crate::error::{Error, Result};

const TAG_SYMBOLS: [&str; 25] = [
    "N", "O", "^", "S", "Z", "V", "A", "R", "!", "D", "P", "&", "T", "X", "#", "@", "~", "U", "E", "$", ",", "G", "L",
    "M", "Y",
];

/// One tag of the CMU tweet tagset, stored as its position in tagset order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(u8);

impl Tag {
    pub fn symbol(self) -> &'static str {
        TAG_SYMBOLS[self.0 as usize]
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TagSet::position(s).ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// The fixed, ordered tagset. Order is the decoding tie-break.
pub struct TagSet;

impl TagSet {
    pub const LEN: usize = 25;

    pub fn tags() -> impl Iterator<Item = Tag> {
        (0..Self::LEN as u8).map(Tag)
    }

    pub fn symbols() -> &'static [&'static str; 25] {
        &TAG_SYMBOLS
    }

    pub fn position(symbol: &str) -> Option<Tag> {
        TAG_SYMBOLS.iter().position(|s| *s == symbol).map(|i| Tag(i as u8))
    }

    pub fn first() -> Tag {
        Tag(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Domain::Source),
            "target" => Ok(Domain::Target),
            other => Err(Error::invalid(format!("unknown domain {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    tokens: Vec<Token>,
    tags: Vec<Tag>,
    domain: Domain,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<Token>, tags: Vec<Tag>, domain: Domain) -> Result<Self> {
        if tokens.len() != tags.len() {
            return Err(Error::Arity {
                tokens: tokens.len(),
                tags: tags.len(),
            });
        }
        Ok(TaggedSentence { tokens, tags, domain })
    }

    /// Convenience for `(surface, tag symbol)` pairs.
    pub fn from_pairs(pairs: &[(&str, &str)], domain: Domain) -> Result<Self> {
        let surfaces: Vec<&str> = pairs.iter().map(|p| p.0).collect();
        let tags = pairs.iter().map(|p| p.1.parse()).collect::<Result<Vec<Tag>>>()?;
        TaggedSentence::new(crate::corpus::tokens_from_surfaces(&surfaces), tags, domain)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Bias,
    Word,
    Shape,
    Prefixes,
    Suffixes,
    HasDigit,
    HasHyphen,
    Kind,
    PrevWord,
    NextWord,
    PrevTag,
}

impl Template {
    pub const ALL: [Template; 11] = [
        Template::Bias,
        Template::Word,
        Template::Shape,
        Template::Prefixes,
        Template::Suffixes,
        Template::HasDigit,
        Template::HasHyphen,
        Template::Kind,
        Template::PrevWord,
        Template::NextWord,
        Template::PrevTag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Bias => "bias",
            Template::Word => "word",
            Template::Shape => "shape",
            Template::Prefixes => "prefixes",
            Template::Suffixes => "suffixes",
            Template::HasDigit => "has_digit",
            Template::HasHyphen => "has_hyphen",
            Template::Kind => "kind",
            Template::PrevWord => "prev_word",
            Template::NextWord => "next_word",
            Template::PrevTag => "prev_tag",
        }
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Template::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown feature template {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggerFeatures {
    pub templates: Vec<Template>,
    /// Whether features are domain-augmented. Off means plain pooled
    /// training over both corpora.
    pub augment: bool,
}

impl Default for TaggerFeatures {
    fn default() -> Self {
        TaggerFeatures {
            templates: Template::ALL.to_vec(),
            augment: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    weights: HashMap<String, HashMap<Tag, f64>>,
    features: TaggerFeatures,
    meta: TrainingMeta,
}

impl TaggerModel {
    /// Zero weights are dropped.
    pub fn from_weights(
        weights: HashMap<String, HashMap<Tag, f64>>,
        features: TaggerFeatures,
        meta: TrainingMeta,
    ) -> Self {
        let weights = weights
            .into_iter()
            .filter_map(|(f, mut per_tag)| {
                per_tag.retain(|_, w| *w != 0.0);
                (!per_tag.is_empty()).then_some((f, per_tag))
            })
            .collect();
        TaggerModel {
            weights,
            features,
            meta,
        }
    }

    pub fn weights(&self) -> &HashMap<String, HashMap<Tag, f64>> {
        &self.weights
    }

    pub fn feature_config(&self) -> &TaggerFeatures {
        &self.features
    }

    pub fn meta(&self) -> TrainingMeta {
        self.meta
    }

    pub fn weight(&self, feature: &str, tag: Tag) -> f64 {
        self.weights
            .get(feature)
            .and_then(|m| m.get(&tag))
            .copied()
            .unwrap_or(0.0)
    }

    fn scores(&self, features: &[String]) -> [f64; TagSet::LEN] {
        score_with(&self.weights, features)
    }
}

pub(crate) fn score_with(weights: &HashMap<String, HashMap<Tag, f64>>, features: &[String]) -> [f64; TagSet::LEN] {
    let mut scores = [0.0; TagSet::LEN];
    for f in features {
        if let Some(per_tag) = weights.get(f) {
            for (tag, w) in per_tag {
                scores[tag.index()] += w;
            }
        }
    }
    scores
}

/// Highest score; the earliest tag in tagset order wins ties.
pub(crate) fn best_tag(scores: &[f64; TagSet::LEN]) -> Tag {
    let mut best = 0;
    for i in 1..TagSet::LEN {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Tag(best as u8)
}

/// Replaces each feature `f` with `shared|f` and `dom=<domain>|f`.
pub fn augment(features: &[String], domain: Domain) -> Vec<String> {
    let mut out = Vec::with_capacity(features.len() * 2);
    for f in features {
        out.push(format!("shared|{f}"));
        out.push(format!("dom={domain}|{f}"));
    }
    out
}

fn shape(word: &str) -> String {
    let mut out = String::new();
    let mut last = None;
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if last != Some(s) {
            out.push(s);
            last = Some(s);
        }
    }
    out
}

/// Un-augmented features for the token at `i`, given the tag predicted for
/// the previous token.
pub fn token_features(tokens: &[Token], i: usize, prev: Option<Tag>, templates: &[Template]) -> Vec<String> {
    let tok = &tokens[i];
    let lower = tok.lower();
    let chars: Vec<char> = lower.chars().collect();
    let mut out = Vec::with_capacity(16);
    for t in templates {
        match t {
            Template::Bias => out.push("bias".to_string()),
            Template::Word => out.push(format!("w={lower}")),
            Template::Shape => out.push(format!("shape={}", shape(&tok.surface))),
            Template::Prefixes => {
                for n in 1..=3.min(chars.len()) {
                    out.push(format!("pre{n}={}", chars[..n].iter().collect::<String>()));
                }
            }
            Template::Suffixes => {
                for n in 1..=3.min(chars.len()) {
                    out.push(format!(
                        "suf{n}={}",
                        chars[chars.len() - n..].iter().collect::<String>()
                    ));
                }
            }
            Template::HasDigit => {
                if chars.iter().any(|c| c.is_numeric()) {
                    out.push("has_digit".to_string());
                }
            }
            Template::HasHyphen => {
                if chars.contains(&'-') {
                    out.push("has_hyphen".to_string());
                }
            }
            Template::Kind => out.push(format!("kind={}", tok.kind)),
            Template::PrevWord => match i.checked_sub(1) {
                Some(p) => out.push(format!("w-1={}", tokens[p].lower())),
                None => out.push("w-1=<s>".to_string()),
            },
            Template::NextWord => match tokens.get(i + 1) {
                Some(n) => out.push(format!("w+1={}", n.lower())),
                None => out.push("w+1=</s>".to_string()),
            },
            Template::PrevTag => match prev {
                Some(t) => out.push(format!("t-1={t}")),
                None => out.push("t-1=<s>".to_string()),
            },
        }
    }
    out
}

pub(crate) fn scored_features(
    config: &TaggerFeatures,
    tokens: &[Token],
    i: usize,
    prev: Option<Tag>,
    domain: Domain,
) -> Vec<String> {
    let feats = token_features(tokens, i, prev, &config.templates);
    if config.augment {
        augment(&feats, domain)
    } else {
        feats
    }
}

/// Greedy left-to-right decoding.
pub fn tag(model: &TaggerModel, tokens: &[Token], domain: Domain) -> Vec<Tag> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut prev = None;
    for i in 0..tokens.len() {
        let feats = scored_features(&model.features, tokens, i, prev, domain);
        let t = best_tag(&model.scores(&feats));
        out.push(t);
        prev = Some(t);
    }
    out
}

/// Token-level accuracy, tagging each sentence in its own domain.
pub fn tagger_accuracy(model: &TaggerModel, gold: &[TaggedSentence]) -> Result<f64> {
    let total: usize = gold.iter().map(TaggedSentence::len).sum();
    if total == 0 {
        return Err(Error::Empty("gold tagged corpus has no tokens"));
    }
    let correct: usize = gold
        .iter()
        .map(|s| {
            tag(model, &s.tokens, s.domain)
                .iter()
                .zip(&s.tags)
                .filter(|(p, g)| p == g)
                .count()
        })
        .sum();
    Ok(correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn tagset_is_25_distinct() {
        let mut syms: Vec<_> = TagSet::symbols().to_vec();
        syms.sort();
        syms.dedup();
        assert_eq!(syms.len(), 25);
        assert_eq!("N".parse::<Tag>().unwrap(), TagSet::first());
        assert_eq!(",".parse::<Tag>().unwrap().symbol(), ",");
        assert!("NN".parse::<Tag>().is_err());
    }

    #[test]
    fn augment_rule() {
        assert_eq!(
            augment(&s(&["w=opp"]), Domain::Target),
            s(&["shared|w=opp", "dom=target|w=opp"])
        );
        assert!(augment(&[], Domain::Source).is_empty());
        let src = augment(&s(&["w=run", "suf3=unn"]), Domain::Source);
        let tgt = augment(&s(&["w=run", "suf3=unn"]), Domain::Target);
        assert_eq!(src.len(), 4);
        let shared = |v: &[String]| v.iter().step_by(2).cloned().collect::<Vec<_>>();
        assert_eq!(shared(&src), shared(&tgt));
    }

    #[test]
    fn feature_templates() {
        let toks = tokenize("Lil-B 2day");
        let f = token_features(&toks, 0, None, &Template::ALL);
        for expected in [
            "bias",
            "w=lil-b",
            "shape=Xx-X",
            "pre3=lil",
            "suf2=-b",
            "has_hyphen",
            "kind=word",
            "w-1=<s>",
            "w+1=2day",
            "t-1=<s>",
        ] {
            assert!(f.contains(&expected.to_string()), "missing {expected} in {f:?}");
        }
        let f = token_features(&toks, 1, Some(TagSet::first()), &Template::ALL);
        assert!(f.contains(&"has_digit".to_string()));
        assert!(f.contains(&"t-1=N".to_string()));
        assert!(f.contains(&"w+1=</s>".to_string()));
        assert!(!f.contains(&"has_hyphen".to_string()));
    }

    #[test]
    fn zero_model_tags_first() {
        let model = TaggerModel::from_weights(
            HashMap::new(),
            TaggerFeatures::default(),
            TrainingMeta { epochs: 1, seed: 0 },
        );
        assert!(tag(&model, &[], Domain::Target).is_empty());
        let toks = tokenize("who dat :)");
        assert_eq!(tag(&model, &toks, Domain::Target), vec![TagSet::first(); 3]);
    }

    #[test]
    fn accuracy_on_empty_gold_errors() {
        let model = TaggerModel::from_weights(
            HashMap::new(),
            TaggerFeatures::default(),
            TrainingMeta { epochs: 1, seed: 0 },
        );
        assert!(tagger_accuracy(&model, &[]).is_err());
    }

    #[test]
    fn sentence_arity() {
        let toks = tokenize("a b");
        assert!(TaggedSentence::new(toks, vec![TagSet::first()], Domain::Source).is_err());
    }
}
