//! Parallel corpus, translation table and glossary formats.
//!
//! Parallel corpus: one pair per line, `source tokens<TAB>gloss tokens`,
//! tokens space-separated. Blank lines are skipped; there are no comment
//! lines because tweet tokens may legitimately begin with `#`.
//!
//! Table: `streetlex-ttable v1`, `key=value` metadata, blank line,
//! `source<TAB>gloss<TAB>prob` entries, blank line, `source<TAB>count` lines.
//!
//! Glossary: `source<TAB>gloss<TAB>prob` with six decimals.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{GlossEntry, Glossary, ParallelPair, TranslationTable};
use crate::error::{Error, Result};

pub const TABLE_HEADER: &str = "streetlex-ttable v1";

pub fn read_parallel<R: BufRead>(reader: R) -> Result<Vec<ParallelPair>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (src, gloss) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(idx + 1, "expected source<TAB>gloss"))?;
        let src: Vec<&str> = src.split_whitespace().collect();
        let gloss: Vec<&str> = gloss.split_whitespace().collect();
        out.push(ParallelPair::new(&src, &gloss).map_err(|e| Error::parse(idx + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn write_parallel<W: Write>(pairs: &[ParallelPair], mut out: W) -> Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}", p.source().join(" "), p.gloss().join(" "))?;
    }
    Ok(())
}

pub fn write_table<W: Write>(table: &TranslationTable, mut out: W) -> Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    writeln!(out, "iterations={}", table.iterations_run)?;
    writeln!(out, "use_null={}", table.use_null)?;
    writeln!(out)?;
    for (s, dist) in &table.probs {
        for (g, p) in dist {
            writeln!(out, "{s}\t{g}\t{p}")?;
        }
    }
    writeln!(out)?;
    for (s, n) in &table.source_counts {
        writeln!(out, "{s}\t{n}")?;
    }
    Ok(())
}

pub fn read_table<R: BufRead>(reader: R) -> Result<TranslationTable> {
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == TABLE_HEADER => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(Error::Model(format!("missing `{TABLE_HEADER}` header"))),
    }
    let mut iterations = None;
    let mut use_null = None;
    for (idx, line) in lines.by_ref() {
        let line = line?;
        if line.trim().is_empty() {
            break;
        }
        match line.split_once('=') {
            Some(("iterations", v)) => {
                iterations = Some(v.parse().map_err(|_| Error::parse(idx + 1, "bad iterations"))?)
            }
            Some(("use_null", v)) => use_null = Some(v.parse().map_err(|_| Error::parse(idx + 1, "bad use_null"))?),
            _ => return Err(Error::parse(idx + 1, format!("unexpected metadata line {line:?}"))),
        }
    }
    let (Some(iterations_run), Some(use_null)) = (iterations, use_null) else {
        return Err(Error::Model("table metadata needs iterations and use_null".into()));
    };
    let mut probs: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (idx, line) in lines.by_ref() {
        let line = line?;
        if line.is_empty() {
            break;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [s, g, p] = cols[..] else {
            return Err(Error::parse(idx + 1, "expected source<TAB>gloss<TAB>prob"));
        };
        let p: f64 = p
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("bad probability {p:?}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(idx + 1, format!("probability {p} outside [0, 1]")));
        }
        probs.entry(s.to_string()).or_default().insert(g.to_string(), p);
    }
    let mut source_counts = BTreeMap::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (s, n) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(idx + 1, "expected source<TAB>count"))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("bad count {n:?}")))?;
        source_counts.insert(s.to_string(), n);
    }
    Ok(TranslationTable {
        probs,
        source_counts,
        use_null,
        iterations_run,
        log_likelihoods: Vec::new(),
    })
}

pub fn write_glossary<W: Write>(glossary: &Glossary, mut out: W) -> Result<()> {
    for (s, e) in glossary.entries() {
        writeln!(out, "{s}\t{}\t{:.6}", e.gloss, e.prob)?;
    }
    Ok(())
}

pub fn read_glossary<R: BufRead>(reader: R) -> Result<Glossary> {
    let mut entries = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [s, g, p] = cols[..] else {
            return Err(Error::parse(idx + 1, "expected source<TAB>gloss<TAB>probability"));
        };
        let prob: f64 = p
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("bad probability {p:?}")))?;
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::parse(idx + 1, format!("probability {prob} outside [0, 1]")));
        }
        entries.insert(
            s.to_lowercase(),
            GlossEntry {
                gloss: g.to_lowercase(),
                prob,
            },
        );
    }
    Ok(Glossary { entries })
}
