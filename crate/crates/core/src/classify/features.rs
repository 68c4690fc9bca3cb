use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::affect::{AffectVector, DIMENSIONS};
use crate::corpus::{Token, TokenKind};
use crate::error::{Error, Result};
use crate::postag::Tag;

/// Sparse real-valued features. Zero values are never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    features: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, delta: f64) {
        let name = name.into();
        let v = self.features.entry(name.clone()).or_insert(0.0);
        *v += delta;
        if *v == 0.0 {
            self.features.remove(&name);
        }
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        if value == 0.0 {
            self.features.remove(&name);
        } else {
            self.features.insert(name, value);
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.features.get(name).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.features.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.features.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

impl FromIterator<(String, f64)> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut fv = FeatureVector::new();
        for (k, v) in iter {
            fv.add(k, v);
        }
        fv
    }
}

/// Feature families, each independently switchable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// `uni:` and `bi:` lowercased token n-gram counts.
    pub lexical: bool,
    /// `pos:` tag and `posbi:` tag-bigram counts.
    pub pos: bool,
    /// `emo:`, `hash:`, `mention_present`, `url_present` and `kind:` counts.
    pub emoticon_hashtag: bool,
    /// `aff:` aggregates, present only when some token matched the lexicon.
    pub affect: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            lexical: true,
            pos: true,
            emoticon_hashtag: true,
            affect: true,
        }
    }
}

impl FeatureConfig {
    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.lexical, "lexical"),
            (self.pos, "pos"),
            (self.emoticon_hashtag, "emoticon_hashtag"),
            (self.affect, "affect"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect()
    }

    pub fn from_names<'a, I: IntoIterator<Item = &'a str>>(names: I) -> Result<Self> {
        let mut cfg = FeatureConfig {
            lexical: false,
            pos: false,
            emoticon_hashtag: false,
            affect: false,
        };
        for n in names {
            match n {
                "lexical" => cfg.lexical = true,
                "pos" => cfg.pos = true,
                "emoticon_hashtag" => cfg.emoticon_hashtag = true,
                "affect" => cfg.affect = true,
                "" => {}
                other => return Err(Error::invalid(format!("unknown feature family {other:?}"))),
            }
        }
        Ok(cfg)
    }
}

pub fn extract_features(
    tokens: &[Token],
    tags: &[Tag],
    affect: &AffectVector,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    if tokens.len() != tags.len() {
        return Err(Error::Arity {
            tokens: tokens.len(),
            tags: tags.len(),
        });
    }
    let mut fv = FeatureVector::new();
    if config.lexical {
        let lower: Vec<String> = tokens.iter().map(Token::lower).collect();
        for w in &lower {
            fv.add(format!("uni:{w}"), 1.0);
        }
        for w in lower.windows(2) {
            fv.add(format!("bi:{}_{}", w[0], w[1]), 1.0);
        }
    }
    if config.pos {
        for t in tags {
            fv.add(format!("pos:{t}"), 1.0);
        }
        for w in tags.windows(2) {
            fv.add(format!("posbi:{}_{}", w[0], w[1]), 1.0);
        }
    }
    if config.emoticon_hashtag {
        for tok in tokens {
            fv.add(format!("kind:{}", tok.kind), 1.0);
            match tok.kind {
                TokenKind::Emoticon | TokenKind::Emoji => fv.set(format!("emo:{}", tok.surface), 1.0),
                TokenKind::Hashtag => fv.set(format!("hash:{}", tok.lower().trim_start_matches('#')), 1.0),
                TokenKind::Mention => fv.set("mention_present", 1.0),
                TokenKind::Url => fv.set("url_present", 1.0),
                _ => {}
            }
        }
    }
    if config.affect {
        if let Some(stats) = &affect.stats {
            for (dim, s) in DIMENSIONS.iter().zip(stats) {
                fv.set(format!("aff:{dim}_mean"), s.mean);
                fv.set(format!("aff:{dim}_min"), s.min);
                fv.set(format!("aff:{dim}_max"), s.max);
            }
            fv.set("aff:coverage", affect.coverage);
        }
    }
    Ok(fv)
}
