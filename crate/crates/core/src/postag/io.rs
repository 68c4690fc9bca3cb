//! Tagged-corpus TSV and tagger model persistence.
//!
//! Tagged corpus: sentence blocks separated by blank lines, each opened by a
//! `# domain: source|target` line and followed by `token<TAB>tag` lines.
//!
//! Model: a `streetlex-tagger v1` header, `key=value` metadata lines, a blank
//! line, then `feature<TAB>tag<TAB>weight` lines sorted by feature and tag.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Domain, Tag, TaggedSentence, TaggerFeatures, TaggerModel, Template, TrainingMeta};
use crate::corpus::tokens_from_surfaces;
use crate::error::{Error, Result};

pub const MODEL_HEADER: &str = "streetlex-tagger v1";

pub fn read_tagged<R: BufRead>(reader: R) -> Result<Vec<TaggedSentence>> {
    let mut out = Vec::new();
    let mut domain: Option<(usize, Domain)> = None;
    let mut surfaces: Vec<String> = Vec::new();
    let mut tags: Vec<Tag> = Vec::new();

    fn flush(
        domain: &mut Option<(usize, Domain)>,
        surfaces: &mut Vec<String>,
        tags: &mut Vec<Tag>,
        out: &mut Vec<TaggedSentence>,
    ) -> Result<()> {
        if let Some((line, d)) = domain.take() {
            if surfaces.is_empty() {
                return Err(Error::parse(line, "sentence block has no tokens"));
            }
            let toks = tokens_from_surfaces(surfaces);
            out.push(TaggedSentence::new(toks, std::mem::take(tags), d)?);
            surfaces.clear();
        }
        Ok(())
    }

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut domain, &mut surfaces, &mut tags, &mut out)?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("# domain:") {
            flush(&mut domain, &mut surfaces, &mut tags, &mut out)?;
            let d = rest
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            domain = Some((lineno, d));
            continue;
        }
        if domain.is_none() {
            return Err(Error::parse(lineno, "token line outside a `# domain:` block"));
        }
        let (tok, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected token<TAB>tag"))?;
        if tok.is_empty() || tok.chars().any(char::is_whitespace) {
            return Err(Error::parse(lineno, format!("bad token {tok:?}")));
        }
        let tag: Tag = tag.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        surfaces.push(tok.to_string());
        tags.push(tag);
    }
    flush(&mut domain, &mut surfaces, &mut tags, &mut out)?;
    Ok(out)
}

pub fn write_tagged<W: Write>(sentences: &[TaggedSentence], mut out: W) -> Result<()> {
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# domain: {}", s.domain())?;
        for (tok, tag) in s.tokens().iter().zip(s.tags()) {
            writeln!(out, "{}\t{}", tok.surface, tag)?;
        }
    }
    Ok(())
}

pub fn write_model<W: Write>(model: &TaggerModel, mut out: W) -> Result<()> {
    writeln!(out, "{MODEL_HEADER}")?;
    let meta = model.meta();
    let cfg = model.feature_config();
    writeln!(out, "epochs={}", meta.epochs)?;
    writeln!(out, "seed={}", meta.seed)?;
    writeln!(out, "augment={}", cfg.augment)?;
    let names: Vec<&str> = cfg.templates.iter().map(|t| t.name()).collect();
    writeln!(out, "templates={}", names.join(","))?;
    writeln!(out)?;
    let mut features: Vec<&String> = model.weights().keys().collect();
    features.sort();
    for f in features {
        let mut per_tag: Vec<(&Tag, &f64)> = model.weights()[f].iter().collect();
        per_tag.sort_by_key(|(t, _)| **t);
        for (tag, w) in per_tag {
            writeln!(out, "{f}\t{tag}\t{w}")?;
        }
    }
    Ok(())
}

pub fn read_model<R: BufRead>(reader: R) -> Result<TaggerModel> {
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == MODEL_HEADER => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(Error::Model(format!("missing `{MODEL_HEADER}` header"))),
    }
    let mut meta: HashMap<String, String> = HashMap::new();
    for (idx, line) in lines.by_ref() {
        let line = line?;
        if line.trim().is_empty() {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, "expected key=value"))?;
        meta.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| {
        meta.get(k)
            .ok_or_else(|| Error::Model(format!("missing metadata key {k:?}")))
    };
    let num = |k: &str| -> Result<u64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Model(format!("bad value for {k:?}")))
    };
    let epochs = num("epochs")? as usize;
    let seed = num("seed")?;
    let augment = match get("augment")?.as_str() {
        "true" => true,
        "false" => false,
        other => return Err(Error::Model(format!("bad augment flag {other:?}"))),
    };
    let templates = get("templates")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(str::parse::<Template>)
        .collect::<Result<Vec<_>>>()?;
    let mut weights: HashMap<String, HashMap<Tag, f64>> = HashMap::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(f), Some(t), Some(w), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::parse(idx + 1, "expected feature<TAB>tag<TAB>weight"));
        };
        let tag: Tag = t.parse().map_err(|e: Error| Error::parse(idx + 1, e.to_string()))?;
        let w: f64 = w
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("bad weight {w:?}")))?;
        weights.entry(f.to_string()).or_default().insert(tag, w);
    }
    Ok(TaggerModel::from_weights(
        weights,
        TaggerFeatures { templates, augment },
        TrainingMeta { epochs, seed },
    ))
}
