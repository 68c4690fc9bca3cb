//! Affect lexicon (pleasantness / activation / imagery) and per-tweet affect
//! aggregates, with glossary fallback for nonstandard tokens.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::align::Glossary;
use crate::corpus::{Token, TokenKind};
use crate::error::{Error, Result};

pub const SCORE_MIN: f64 = 1.0;
pub const SCORE_MAX: f64 = 3.0;

pub const DIMENSIONS: [&str; 3] = ["pleasantness", "activation", "imagery"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffectScores {
    pub pleasantness: f64,
    pub activation: f64,
    pub imagery: f64,
}

impl AffectScores {
    pub fn as_array(&self) -> [f64; 3] {
        [self.pleasantness, self.activation, self.imagery]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AffectLexicon {
    entries: HashMap<String, AffectScores>,
}

impl AffectLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Words are lowercased. Values outside `[SCORE_MIN, SCORE_MAX]` are
    /// rejected.
    pub fn insert(&mut self, word: &str, scores: AffectScores) -> Result<Option<AffectScores>> {
        for (dim, v) in DIMENSIONS.iter().zip(scores.as_array()) {
            if !(SCORE_MIN..=SCORE_MAX).contains(&v) {
                return Err(Error::AffectRange {
                    line: 0,
                    word: word.to_string(),
                    dimension: dim,
                    value: v,
                    min: SCORE_MIN,
                    max: SCORE_MAX,
                });
            }
        }
        Ok(self.entries.insert(word.to_lowercase(), scores))
    }

    pub fn get(&self, word: &str) -> Option<AffectScores> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by word.
    pub fn entries(&self) -> Vec<(&str, AffectScores)> {
        let mut v: Vec<(&str, AffectScores)> = self.entries.iter().map(|(k, s)| (k.as_str(), *s)).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }
}

/// Reads `word<TAB>pleasantness<TAB>activation<TAB>imagery` lines. `#` lines
/// and blank lines are skipped. A repeated word keeps its last entry and logs
/// a warning.
pub fn load_lexicon<R: BufRead>(reader: R) -> Result<AffectLexicon> {
    let mut lex = AffectLexicon::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [word, p, a, i] = cols[..] else {
            return Err(Error::parse(
                lineno,
                "expected word<TAB>pleasantness<TAB>activation<TAB>imagery",
            ));
        };
        if word.is_empty() {
            return Err(Error::parse(lineno, "empty word"));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad number {s:?}")))
        };
        let scores = AffectScores {
            pleasantness: num(p)?,
            activation: num(a)?,
            imagery: num(i)?,
        };
        match lex.insert(word, scores) {
            Ok(Some(_)) => log::warn!("affect lexicon line {lineno}: duplicate word {word:?}, keeping the later entry"),
            Ok(None) => {}
            Err(Error::AffectRange {
                word,
                dimension,
                value,
                min,
                max,
                ..
            }) => {
                return Err(Error::AffectRange {
                    line: lineno,
                    word,
                    dimension,
                    value,
                    min,
                    max,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(lex)
}

pub fn write_lexicon<W: Write>(lexicon: &AffectLexicon, mut out: W) -> Result<()> {
    writeln!(out, "# word\tpleasantness\tactivation\timagery")?;
    for (w, s) in lexicon.entries() {
        writeln!(out, "{w}\t{}\t{}\t{}", s.pleasantness, s.activation, s.imagery)?;
    }
    Ok(())
}

fn eligible(kind: TokenKind) -> bool {
    matches!(kind, TokenKind::Word | TokenKind::Emoticon | TokenKind::Emoji)
}

/// Direct lexicon hit on the lowercased surface first, then the glossary's
/// standard equivalent. Only word, emoticon and emoji tokens are looked up.
pub fn lookup(token: &Token, lexicon: &AffectLexicon, glossary: Option<&Glossary>) -> Option<AffectScores> {
    if !eligible(token.kind) {
        return None;
    }
    let key = token.lower();
    lexicon
        .get(&key)
        .or_else(|| glossary?.get(&key).and_then(|e| lexicon.get(&e.gloss)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffectVector {
    pub matched: usize,
    /// Word, emoticon and emoji tokens in the tweet.
    pub eligible: usize,
    pub coverage: f64,
    /// Per-dimension aggregates in [`DIMENSIONS`] order; `None` when nothing
    /// matched.
    pub stats: Option<[DimensionStats; 3]>,
}

impl AffectVector {
    pub fn empty() -> Self {
        AffectVector {
            matched: 0,
            eligible: 0,
            coverage: 0.0,
            stats: None,
        }
    }
}

pub fn affect_features(tokens: &[Token], lexicon: &AffectLexicon, glossary: Option<&Glossary>) -> AffectVector {
    let eligible = tokens.iter().filter(|t| eligible(t.kind)).count();
    let hits: Vec<[f64; 3]> = tokens
        .iter()
        .filter_map(|t| lookup(t, lexicon, glossary))
        .map(|s| s.as_array())
        .collect();
    if hits.is_empty() {
        return AffectVector {
            eligible,
            ..AffectVector::empty()
        };
    }
    let n = hits.len() as f64;
    let stats = std::array::from_fn(|d| {
        // Sorting first makes the mean independent of token order.
        let mut vals: Vec<f64> = hits.iter().map(|h| h[d]).collect();
        vals.sort_by(f64::total_cmp);
        DimensionStats {
            mean: (vals.iter().sum::<f64>() / n).clamp(vals[0], vals[vals.len() - 1]),
            min: vals[0],
            max: vals[vals.len() - 1],
        }
    });
    AffectVector {
        matched: hits.len(),
        eligible,
        coverage: hits.len() as f64 / eligible as f64,
        stats: Some(stats),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::align::GlossEntry;
    use crate::corpus::tokenize;

    const FIXTURE: &str =
        "# word\tpleasantness\tactivation\timagery\nsad\t1.0\t1.5\t2.0\nhappy\t3.0\t2.0\t2.0\nenemy\t1.2\t2.4\t1.8\n";

    fn lex() -> AffectLexicon {
        load_lexicon(FIXTURE.as_bytes()).unwrap()
    }

    fn gloss() -> Glossary {
        Glossary::from_entries([(
            "opp".to_string(),
            GlossEntry {
                gloss: "enemy".into(),
                prob: 0.9,
            },
        )])
    }

    #[test]
    fn parses_lines() {
        let l = lex();
        assert_eq!(
            l.get("sad"),
            Some(AffectScores {
                pleasantness: 1.0,
                activation: 1.5,
                imagery: 2.0
            })
        );
        assert!(load_lexicon(&b""[..]).unwrap().is_empty());
    }

    #[test]
    fn range_and_format_errors() {
        let err = load_lexicon("ok\t2\t2\t2\nbad\t5.0\t2\t2\n".as_bytes()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::AffectRange {
                    line: 2,
                    dimension: "pleasantness",
                    ..
                }
            ),
            "{err}"
        );
        assert!(matches!(
            load_lexicon("w\t1\t2\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_lexicon("w\t1\tx\t2\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn write_then_read() {
        let l = lex();
        let mut buf = Vec::new();
        write_lexicon(&l, &mut buf).unwrap();
        assert_eq!(load_lexicon(&buf[..]).unwrap(), l);
    }

    #[test]
    fn duplicate_keeps_last() {
        let l = load_lexicon("w\t1\t1\t1\nW\t2\t2\t2\n".as_bytes()).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.get("w").unwrap().pleasantness, 2.0);
    }

    #[test]
    fn lookup_rules() {
        let l = lex();
        let g = gloss();
        let t = tokenize("SAD opp http://t.co/sad #sad");
        assert_eq!(lookup(&t[0], &l, Some(&g)), l.get("sad"));
        assert_eq!(lookup(&t[1], &l, Some(&g)), l.get("enemy"));
        assert_eq!(lookup(&t[1], &l, None), None);
        assert_eq!(lookup(&t[2], &l, Some(&g)), None);
        assert_eq!(lookup(&t[3], &l, Some(&g)), None);
    }

    #[test]
    fn direct_hit_beats_glossary() {
        let l = lex();
        let g = Glossary::from_entries([(
            "sad".to_string(),
            GlossEntry {
                gloss: "happy".into(),
                prob: 1.0,
            },
        )]);
        assert_eq!(lookup(&tokenize("sad")[0], &l, Some(&g)), l.get("sad"));
    }

    #[test]
    fn aggregates() {
        let l = lex();
        let v = affect_features(&tokenize("sad sad"), &l, None);
        let s = v.stats.unwrap();
        assert_eq!((s[0].mean, s[0].min, s[0].max), (1.0, 1.0, 1.0));
        assert_eq!((s[1].mean, s[2].mean), (1.5, 2.0));
        assert_eq!(v.coverage, 1.0);

        let v = affect_features(&tokenize("lol idk"), &l, Some(&gloss()));
        assert_eq!((v.matched, v.coverage, v.stats), (0, 0.0, None));

        let v = affect_features(&tokenize("sad happy"), &l, None);
        let p = v.stats.unwrap()[0];
        assert_eq!((p.mean, p.min, p.max), (2.0, 1.0, 3.0));

        assert_eq!(affect_features(&[], &l, None), AffectVector::empty());
    }

    #[test]
    fn glossary_mediation() {
        let v = affect_features(&tokenize("opp opp"), &lex(), Some(&gloss()));
        assert!(v.coverage > 0.0);
        let v = affect_features(&tokenize("opp opp"), &lex(), None);
        assert_eq!(v.coverage, 0.0);
    }

    fn words() -> Vec<&'static str> {
        vec![
            "sad",
            "happy",
            "enemy",
            "opp",
            "lol",
            "#x",
            ":(",
            "http://a.b",
            "idk",
            "4",
        ]
    }

    proptest! {
        #[test]
        fn order_invariant(idx in prop::collection::vec(0usize..10, 0..12), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let w = words();
            let mut text: Vec<&str> = idx.iter().map(|&i| w[i]).collect();
            let a = affect_features(&tokenize(&text.join(" ")), &lex(), Some(&gloss()));
            text.shuffle(&mut crate::sampling::rng(seed));
            let b = affect_features(&tokenize(&text.join(" ")), &lex(), Some(&gloss()));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn bounds_and_coverage(idx in prop::collection::vec(0usize..10, 0..12)) {
            let w = words();
            let text: Vec<&str> = idx.iter().map(|&i| w[i]).collect();
            let toks = tokenize(&text.join(" "));
            let v = affect_features(&toks, &lex(), Some(&gloss()));
            prop_assert!((0.0..=1.0).contains(&v.coverage));
            if let Some(stats) = v.stats {
                for s in stats {
                    prop_assert!(SCORE_MIN <= s.min && s.min <= s.mean && s.mean <= s.max && s.max <= SCORE_MAX);
                }
            }
            // Adding an entry for an unmatched token never lowers coverage.
            let mut bigger = lex();
            bigger.insert("lol", AffectScores { pleasantness: 2.5, activation: 2.0, imagery: 1.0 }).unwrap();
            let v2 = affect_features(&toks, &bigger, Some(&gloss()));
            prop_assert!(v2.matched >= v.matched && v2.coverage >= v.coverage);
        }
    }
}
