//! Corpus readers and writers (JSONL and TSV).
//!
//! Both formats interleave tweet records and annotation records in a single
//! stream. In JSONL a tweet has an `id` key and an annotation a `tweet_id`
//! key. In TSV the first column names the record type:
//!
//! ```text
//! tweet<TAB>id<TAB>author<TAB>created_at<TAB>reply_to<TAB>text
//! annotation<TAB>tweet_id<TAB>annotator_id<TAB>fine_code[<TAB>six DUVAA fields]
//! ```
//!
//! TSV text fields escape `\\`, `\t`, `\n` and `\r`; an empty `reply_to`
//! column means none.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{Annotation, Codebook, DuvaaContext, LabeledCorpus, Tweet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::invalid(format!("unknown corpus format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TweetRecord {
    id: String,
    author: String,
    created_at: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reply_to: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationRecord {
    tweet_id: String,
    annotator_id: String,
    fine_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duvaa: Option<DuvaaContext>,
}

enum Record {
    Tweet(Tweet),
    Annotation(Annotation),
}

fn parse_timestamp(line: usize, s: &str) -> Result<DateTime<Utc>> {
    // RFC 3339 requires an offset, so naive timestamps are rejected here.
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| {
            Error::parse(
                line,
                format!("bad timestamp {s:?} ({e}); an explicit UTC offset is required"),
            )
        })
}

fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn parse_jsonl(line: usize, text: &str) -> Result<Record> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::parse(line, format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::parse(line, "expected a JSON object"))?;
    if obj.contains_key("tweet_id") {
        let r: AnnotationRecord =
            serde_json::from_value(value).map_err(|e| Error::parse(line, format!("bad annotation: {e}")))?;
        Ok(Record::Annotation(Annotation {
            tweet_id: r.tweet_id,
            annotator_id: r.annotator_id,
            fine_code: r.fine_code,
            duvaa: r.duvaa,
        }))
    } else if obj.contains_key("id") {
        let r: TweetRecord =
            serde_json::from_value(value).map_err(|e| Error::parse(line, format!("bad tweet: {e}")))?;
        Ok(Record::Tweet(Tweet {
            created_at: parse_timestamp(line, &r.created_at)?,
            id: r.id,
            author: r.author,
            text: r.text,
            reply_to: r.reply_to,
        }))
    } else {
        Err(Error::parse(line, "record has neither `id` nor `tweet_id`"))
    }
}

fn unescape(line: usize, s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            other => {
                return Err(Error::parse(
                    line,
                    format!("bad escape sequence \\{}", other.map(String::from).unwrap_or_default()),
                ))
            }
        }
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn parse_tsv(line: usize, text: &str) -> Result<Record> {
    let cols: Vec<&str> = text.split('\t').collect();
    let field = |i: usize| unescape(line, cols[i]);
    match cols[0] {
        "tweet" if cols.len() == 6 => {
            let reply = field(4)?;
            Ok(Record::Tweet(Tweet {
                id: field(1)?,
                author: field(2)?,
                created_at: parse_timestamp(line, cols[3])?,
                reply_to: (!reply.is_empty()).then_some(reply),
                text: field(5)?,
            }))
        }
        "annotation" if cols.len() == 4 || cols.len() == 10 => {
            let duvaa = if cols.len() == 10 {
                let mut f: [String; 6] = Default::default();
                for (k, slot) in f.iter_mut().enumerate() {
                    *slot = field(4 + k)?;
                }
                Some(DuvaaContext::from_fields(f))
            } else {
                None
            };
            Ok(Record::Annotation(Annotation {
                tweet_id: field(1)?,
                annotator_id: field(2)?,
                fine_code: field(3)?,
                duvaa,
            }))
        }
        "tweet" => Err(Error::parse(
            line,
            format!("tweet record needs 6 columns, found {}", cols.len()),
        )),
        "annotation" => Err(Error::parse(
            line,
            format!("annotation record needs 4 or 10 columns, found {}", cols.len()),
        )),
        other => Err(Error::parse(line, format!("unknown record type {other:?}"))),
    }
}

fn records<R: BufRead>(source: R, format: CorpusFormat) -> impl Iterator<Item = Result<(usize, Record)>> {
    source.lines().enumerate().filter_map(move |(idx, line)| {
        let lineno = idx + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (format == CorpusFormat::Tsv && line.starts_with('#')) {
            return None;
        }
        let rec = match format {
            CorpusFormat::Jsonl => parse_jsonl(lineno, line),
            CorpusFormat::Tsv => parse_tsv(lineno, line),
        };
        Some(rec.map(|r| (lineno, r)))
    })
}

/// Reads a corpus stream, validating every invariant. Errors name the
/// offending source line. Record order is preserved.
pub fn ingest_corpus<R: BufRead>(source: R, format: CorpusFormat, codebook: &Codebook) -> Result<LabeledCorpus> {
    let mut tweets = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    let mut annotations: Vec<(usize, Annotation)> = Vec::new();
    for rec in records(source, format) {
        let (line, rec) = rec?;
        match rec {
            Record::Tweet(t) => {
                if t.id.is_empty() {
                    return Err(Error::parse(line, "empty tweet id"));
                }
                if t.text.is_empty() {
                    return Err(Error::parse(line, format!("tweet {:?} has empty text", t.id)));
                }
                if !ids.insert(t.id.clone()) {
                    return Err(Error::DuplicateTweet { line, id: t.id });
                }
                tweets.push(t);
            }
            Record::Annotation(a) => {
                if !codebook.contains(&a.fine_code) {
                    return Err(Error::UnknownCode {
                        code: a.fine_code,
                        line: Some(line),
                    });
                }
                annotations.push((line, a));
            }
        }
    }
    let mut seen = HashSet::new();
    for (line, a) in &annotations {
        if !ids.contains(&a.tweet_id) {
            return Err(Error::UnknownTweet {
                line: *line,
                id: a.tweet_id.clone(),
            });
        }
        if !seen.insert((a.tweet_id.as_str(), a.annotator_id.as_str())) {
            return Err(Error::DuplicateAnnotation {
                line: *line,
                tweet_id: a.tweet_id.clone(),
                annotator_id: a.annotator_id.clone(),
            });
        }
    }
    Ok(LabeledCorpus {
        tweets,
        annotations: annotations.into_iter().map(|(_, a)| a).collect(),
        codebook: codebook.clone(),
    })
}

/// Reads a stream of annotation records only (no tweets), as produced by a
/// single coder. Fine codes are checked against the codebook; tweet ids are
/// not resolved.
pub fn read_annotations<R: BufRead>(source: R, format: CorpusFormat, codebook: &Codebook) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for rec in records(source, format) {
        let (line, rec) = rec?;
        let Record::Annotation(a) = rec else {
            return Err(Error::parse(line, "expected an annotation record"));
        };
        if !codebook.contains(&a.fine_code) {
            return Err(Error::UnknownCode {
                code: a.fine_code,
                line: Some(line),
            });
        }
        if seen
            .insert((a.tweet_id.clone(), a.annotator_id.clone()), line)
            .is_some()
        {
            return Err(Error::DuplicateAnnotation {
                line,
                tweet_id: a.tweet_id,
                annotator_id: a.annotator_id,
            });
        }
        out.push(a);
    }
    Ok(out)
}

/// Writes tweets first, then annotations. Re-ingesting the output yields an
/// equal corpus.
pub fn write_corpus<W: Write>(corpus: &LabeledCorpus, format: CorpusFormat, mut out: W) -> Result<()> {
    for t in &corpus.tweets {
        match format {
            CorpusFormat::Jsonl => {
                let rec = TweetRecord {
                    id: t.id.clone(),
                    author: t.author.clone(),
                    created_at: format_timestamp(&t.created_at),
                    text: t.text.clone(),
                    reply_to: t.reply_to.clone(),
                };
                serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
                writeln!(out)?;
            }
            CorpusFormat::Tsv => writeln!(
                out,
                "tweet\t{}\t{}\t{}\t{}\t{}",
                escape(&t.id),
                escape(&t.author),
                format_timestamp(&t.created_at),
                escape(t.reply_to.as_deref().unwrap_or("")),
                escape(&t.text)
            )?,
        }
    }
    for a in &corpus.annotations {
        write_annotation(a, format, &mut out)?;
    }
    Ok(())
}

pub(crate) fn write_annotation<W: Write>(a: &Annotation, format: CorpusFormat, mut out: W) -> Result<()> {
    match format {
        CorpusFormat::Jsonl => {
            let rec = AnnotationRecord {
                tweet_id: a.tweet_id.clone(),
                annotator_id: a.annotator_id.clone(),
                fine_code: a.fine_code.clone(),
                duvaa: a.duvaa.clone(),
            };
            serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        CorpusFormat::Tsv => {
            write!(
                out,
                "annotation\t{}\t{}\t{}",
                escape(&a.tweet_id),
                escape(&a.annotator_id),
                escape(&a.fine_code)
            )?;
            if let Some(d) = &a.duvaa {
                for f in d.fields() {
                    write!(out, "\t{}", escape(f))?;
                }
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T1: &str = r#"{"id":"t1","author":"a","created_at":"2014-03-29T10:00:00Z","text":"rip lil b"}"#;

    #[test]
    fn single_record() {
        let c = ingest_corpus(T1.as_bytes(), CorpusFormat::Jsonl, &Codebook::builtin()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.tweets()[0].id, "t1");
        assert!(c.annotations().is_empty());
    }

    #[test]
    fn empty_stream() {
        for fmt in [CorpusFormat::Jsonl, CorpusFormat::Tsv] {
            let c = ingest_corpus(&b""[..], fmt, &Codebook::builtin()).unwrap();
            assert!(c.is_empty());
        }
    }

    #[test]
    fn unknown_code_names_code_and_line() {
        let cb = Codebook::new([("threats", super::super::Category::Aggression)]).unwrap();
        let input = format!(
            "{T1}\n{}\n",
            r#"{"tweet_id":"t1","annotator_id":"x","fine_code":"sadness"}"#
        );
        let err = ingest_corpus(input.as_bytes(), CorpusFormat::Jsonl, &cb).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sadness") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn errors_report_lines() {
        let cb = Codebook::builtin();
        let dup = format!("{T1}\n\n{T1}\n");
        assert!(matches!(
            ingest_corpus(dup.as_bytes(), CorpusFormat::Jsonl, &cb),
            Err(Error::DuplicateTweet { line: 3, .. })
        ));
        let orphan = format!(
            "{}\n{T1}\n",
            r#"{"tweet_id":"zz","annotator_id":"x","fine_code":"death"}"#
        );
        assert!(matches!(
            ingest_corpus(orphan.as_bytes(), CorpusFormat::Jsonl, &cb),
            Err(Error::UnknownTweet { line: 1, .. })
        ));
        assert!(matches!(
            ingest_corpus("{\"id\":".as_bytes(), CorpusFormat::Jsonl, &cb),
            Err(Error::Parse { line: 1, .. })
        ));
        let naive = r#"{"id":"t1","author":"a","created_at":"2014-03-29T10:00:00","text":"x"}"#;
        assert!(matches!(
            ingest_corpus(naive.as_bytes(), CorpusFormat::Jsonl, &cb),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ingest_corpus("tweet\tt1\ta\n".as_bytes(), CorpusFormat::Tsv, &cb),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn annotation_before_tweet_is_accepted() {
        let input = format!(
            "{}\n{T1}\n",
            r#"{"tweet_id":"t1","annotator_id":"x","fine_code":"death"}"#
        );
        let c = ingest_corpus(input.as_bytes(), CorpusFormat::Jsonl, &Codebook::builtin()).unwrap();
        assert_eq!(c.annotations().len(), 1);
    }

    #[test]
    fn read_annotations_rejects_tweets() {
        let cb = Codebook::builtin();
        assert!(read_annotations(T1.as_bytes(), CorpusFormat::Jsonl, &cb).is_err());
        let a = read_annotations(
            "annotation\tt1\tx\tdeath\nannotation\tt2\tx\tthreats\n".as_bytes(),
            CorpusFormat::Tsv,
            &cb,
        )
        .unwrap();
        assert_eq!(a.len(), 2);
    }

    fn arb_text() -> impl Strategy<Value = String> {
        prop_oneof![
            "[a-z #@:()\t\\\\\n😂é]{1,20}",
            any::<String>().prop_filter("nonempty", |s| !s.is_empty()),
        ]
    }

    fn arb_corpus() -> impl Strategy<Value = LabeledCorpus> {
        let codes: Vec<String> = Codebook::builtin().fine_codes().map(String::from).collect();
        (
            prop::collection::vec(
                (
                    arb_text(),
                    "[a-z_]{0,6}",
                    0i64..2_000_000_000,
                    prop::option::of("[0-9]{1,4}"),
                ),
                0..6,
            ),
            prop::collection::vec(
                (
                    0usize..6,
                    0usize..3,
                    prop::sample::select(codes),
                    prop::option::of(prop::array::uniform6(arb_text())),
                ),
                0..10,
            ),
        )
            .prop_map(|(tweets, anns)| {
                let tweets: Vec<Tweet> = tweets
                    .into_iter()
                    .enumerate()
                    .map(|(i, (text, author, secs, reply))| Tweet {
                        id: format!("t{i}"),
                        author,
                        created_at: DateTime::from_timestamp(secs, 0).unwrap(),
                        text,
                        reply_to: reply,
                    })
                    .collect();
                let mut seen = HashSet::new();
                let annotations = anns
                    .into_iter()
                    .filter(|(t, w, _, _)| *t < tweets.len() && seen.insert((*t, *w)))
                    .map(|(t, w, code, d)| Annotation {
                        tweet_id: format!("t{t}"),
                        annotator_id: format!("coder{w}"),
                        fine_code: code,
                        duvaa: d.map(DuvaaContext::from_fields),
                    })
                    .collect();
                LabeledCorpus::new(tweets, annotations, Codebook::builtin()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn write_then_ingest_is_identity(c in arb_corpus(), tsv in any::<bool>()) {
            let fmt = if tsv { CorpusFormat::Tsv } else { CorpusFormat::Jsonl };
            let mut buf = Vec::new();
            write_corpus(&c, fmt, &mut buf).unwrap();
            let back = ingest_corpus(&buf[..], fmt, c.codebook()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
