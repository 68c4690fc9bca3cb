//! Tweets, annotations, codebooks and the Twitter-aware tokenizer.

mod codebook;
mod io;
mod tokenize;

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use codebook::{Category, Codebook, BUILTIN_CODES};
pub use io::{ingest_corpus, read_annotations, write_corpus, CorpusFormat};
pub use tokenize::{tokenize, tokens_from_surfaces, Span, Token, TokenKind, EMOTICONS};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub reply_to: Option<String>,
}

/// The six interpretive lenses recorded alongside a code during qualitative
/// analysis. All free text.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuvaaContext {
    #[serde(default)]
    pub precipitating_event: String,
    #[serde(default)]
    pub author_profile: String,
    #[serde(default)]
    pub content: String,
    #[serde(default)]
    pub clues: String,
    #[serde(default)]
    pub tone: String,
    #[serde(default)]
    pub trigger_event: String,
}

impl DuvaaContext {
    pub(crate) fn fields(&self) -> [&str; 6] {
        [
            &self.precipitating_event,
            &self.author_profile,
            &self.content,
            &self.clues,
            &self.tone,
            &self.trigger_event,
        ]
    }

    pub(crate) fn from_fields(f: [String; 6]) -> Self {
        let [precipitating_event, author_profile, content, clues, tone, trigger_event] = f;
        DuvaaContext {
            precipitating_event,
            author_profile,
            content,
            clues,
            tone,
            trigger_event,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub tweet_id: String,
    pub annotator_id: String,
    pub fine_code: String,
    pub duvaa: Option<DuvaaContext>,
}

/// How a single gold category is chosen for a tweet that several annotators
/// coded.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldPolicy {
    /// Most frequent collapsed category; ties go to the higher-priority
    /// category (aggression, then grief, then other).
    #[default]
    Majority,
    /// Use one annotator's labels only.
    Annotator(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    tweets: Vec<Tweet>,
    annotations: Vec<Annotation>,
    codebook: Codebook,
}

impl LabeledCorpus {
    /// Validates every corpus invariant. Errors carry 1-based record
    /// positions (tweet index for tweets, annotation index for annotations).
    pub fn new(tweets: Vec<Tweet>, annotations: Vec<Annotation>, codebook: Codebook) -> Result<Self> {
        let mut ids = HashSet::new();
        for (i, t) in tweets.iter().enumerate() {
            if t.id.is_empty() {
                return Err(Error::parse(i + 1, "empty tweet id"));
            }
            if t.text.is_empty() {
                return Err(Error::parse(i + 1, format!("tweet {:?} has empty text", t.id)));
            }
            if !ids.insert(t.id.as_str()) {
                return Err(Error::DuplicateTweet {
                    line: i + 1,
                    id: t.id.clone(),
                });
            }
        }
        let mut seen = HashSet::new();
        for (i, a) in annotations.iter().enumerate() {
            if !ids.contains(a.tweet_id.as_str()) {
                return Err(Error::UnknownTweet {
                    line: i + 1,
                    id: a.tweet_id.clone(),
                });
            }
            if !codebook.contains(&a.fine_code) {
                return Err(Error::UnknownCode {
                    code: a.fine_code.clone(),
                    line: Some(i + 1),
                });
            }
            if !seen.insert((a.tweet_id.as_str(), a.annotator_id.as_str())) {
                return Err(Error::DuplicateAnnotation {
                    line: i + 1,
                    tweet_id: a.tweet_id.clone(),
                    annotator_id: a.annotator_id.clone(),
                });
            }
        }
        Ok(LabeledCorpus {
            tweets,
            annotations,
            codebook,
        })
    }

    pub fn empty(codebook: Codebook) -> Self {
        LabeledCorpus {
            tweets: Vec::new(),
            annotations: Vec::new(),
            codebook,
        }
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Annotator ids in order of first appearance.
    pub fn annotators(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.annotations
            .iter()
            .map(|a| a.annotator_id.as_str())
            .filter(|a| seen.insert(*a))
            .collect()
    }

    /// One optional gold category per tweet, aligned with [`Self::tweets`].
    pub fn gold_labels(&self, policy: &GoldPolicy) -> Vec<Option<Category>> {
        let mut votes: HashMap<&str, [usize; 3]> = HashMap::new();
        for a in &self.annotations {
            if let GoldPolicy::Annotator(who) = policy {
                if &a.annotator_id != who {
                    continue;
                }
            }
            // Validated at construction.
            let cat = self.codebook.collapse(&a.fine_code).expect("validated code");
            votes.entry(a.tweet_id.as_str()).or_default()[cat.index()] += 1;
        }
        self.tweets
            .iter()
            .map(|t| {
                let v = votes.get(t.id.as_str())?;
                let best = *v.iter().max()?;
                Category::ALL.into_iter().find(|c| v[c.index()] == best)
            })
            .collect()
    }

    /// Collapsed-category counts over all annotations.
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut out = BTreeMap::new();
        for a in &self.annotations {
            let cat = self.codebook.collapse(&a.fine_code).expect("validated code");
            *out.entry(cat).or_insert(0) += 1;
        }
        out
    }
}

/// Tweets with `start <= created_at < end`, plus their annotations.
pub fn window_filter(corpus: &LabeledCorpus, start: DateTime<Utc>, end: DateTime<Utc>) -> Result<LabeledCorpus> {
    if start > end {
        return Err(Error::invalid(format!("window start {start} is after end {end}")));
    }
    let tweets: Vec<Tweet> = corpus
        .tweets
        .iter()
        .filter(|t| start <= t.created_at && t.created_at < end)
        .cloned()
        .collect();
    let kept: HashSet<&str> = tweets.iter().map(|t| t.id.as_str()).collect();
    let annotations = corpus
        .annotations
        .iter()
        .filter(|a| kept.contains(a.tweet_id.as_str()))
        .cloned()
        .collect();
    Ok(LabeledCorpus {
        tweets,
        annotations,
        codebook: corpus.codebook.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn tweet(id: &str, day: u32) -> Tweet {
        Tweet {
            id: id.into(),
            author: "a".into(),
            created_at: Utc.with_ymd_and_hms(2014, 3, day, 12, 0, 0).unwrap(),
            text: format!("tweet {id}"),
            reply_to: None,
        }
    }

    fn ann(t: &str, who: &str, code: &str) -> Annotation {
        Annotation {
            tweet_id: t.into(),
            annotator_id: who.into(),
            fine_code: code.into(),
            duvaa: None,
        }
    }

    fn day(d: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2014, 3, d, 0, 0, 0).unwrap()
    }

    #[test]
    fn window_keeps_half_open_interval() {
        let c = LabeledCorpus::new(
            vec![tweet("a", 2), tweet("b", 6), tweet("c", 21)],
            vec![ann("a", "x", "threats"), ann("c", "x", "sadness")],
            Codebook::builtin(),
        )
        .unwrap();
        let w = window_filter(&c, day(1), day(11)).unwrap();
        assert_eq!(w.tweets().iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(w.annotations().len(), 1);

        let all = window_filter(&c, day(1), day(31)).unwrap();
        assert_eq!(all, c);
        assert!(window_filter(&c, day(6), day(6)).unwrap().is_empty());
        // created_at == end is excluded, == start included
        let b = window_filter(&c, c.tweets()[1].created_at, day(31)).unwrap();
        assert_eq!(b.len(), 2);
        assert!(window_filter(&c, day(11), day(1)).is_err());
    }

    #[test]
    fn construction_checks_invariants() {
        let cb = Codebook::builtin();
        assert!(matches!(
            LabeledCorpus::new(vec![tweet("a", 1), tweet("a", 2)], vec![], cb.clone()),
            Err(Error::DuplicateTweet { .. })
        ));
        assert!(matches!(
            LabeledCorpus::new(vec![tweet("a", 1)], vec![ann("z", "x", "threats")], cb.clone()),
            Err(Error::UnknownTweet { .. })
        ));
        assert!(matches!(
            LabeledCorpus::new(vec![tweet("a", 1)], vec![ann("a", "x", "nope")], cb.clone()),
            Err(Error::UnknownCode { .. })
        ));
        assert!(matches!(
            LabeledCorpus::new(
                vec![tweet("a", 1)],
                vec![ann("a", "x", "threats"), ann("a", "x", "death")],
                cb
            ),
            Err(Error::DuplicateAnnotation { .. })
        ));
    }

    #[test]
    fn gold_labels_majority_and_annotator() {
        let c = LabeledCorpus::new(
            vec![tweet("a", 1), tweet("b", 2), tweet("c", 3)],
            vec![
                ann("a", "x", "threats"),
                ann("a", "y", "sadness"),
                ann("b", "x", "women"),
                ann("b", "y", "happiness"),
                ann("b", "z", "death"),
            ],
            Codebook::builtin(),
        )
        .unwrap();
        assert_eq!(
            c.gold_labels(&GoldPolicy::Majority),
            vec![Some(Category::Aggression), Some(Category::Other), None]
        );
        assert_eq!(
            c.gold_labels(&GoldPolicy::Annotator("y".into())),
            vec![Some(Category::Grief), Some(Category::Other), None]
        );
        assert_eq!(c.annotators(), ["x", "y", "z"]);
    }
}
