//! Classifier model file: `streetlex-clf v1`, `key=value` metadata, blank
//! line, then for each class a `CLASS name bias` line followed by sorted
//! `feature<TAB>weight` lines.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use super::{ClassifierModel, ClassifierParams, FeatureConfig};
use crate::corpus::Category;
use crate::error::{Error, Result};

pub const MODEL_HEADER: &str = "streetlex-clf v1";

pub fn write_model<W: Write>(model: &ClassifierModel, mut out: W) -> Result<()> {
    let p = model.params();
    writeln!(out, "{MODEL_HEADER}")?;
    writeln!(out, "lambda={}", p.lambda)?;
    writeln!(out, "epochs={}", p.epochs)?;
    writeln!(out, "seed={}", p.seed)?;
    match p.class_weights {
        Some([a, g, o]) => writeln!(out, "class_weights={a},{g},{o}")?,
        None => writeln!(out, "class_weights=none")?,
    }
    writeln!(out, "features={}", model.feature_config().names().join(","))?;
    writeln!(out)?;
    for c in Category::ALL {
        writeln!(out, "CLASS {} {}", c.as_str(), model.bias(c))?;
        for (f, w) in model.weights(c) {
            writeln!(out, "{f}\t{w}")?;
        }
    }
    Ok(())
}

pub fn read_model<R: BufRead>(reader: R) -> Result<ClassifierModel> {
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
    let bad = |k: &str| Error::Model(format!("bad value for {k:?}"));
    let lambda: f64 = get("lambda")?.parse().map_err(|_| bad("lambda"))?;
    let epochs: usize = get("epochs")?.parse().map_err(|_| bad("epochs"))?;
    let seed: u64 = get("seed")?.parse().map_err(|_| bad("seed"))?;
    let class_weights = match get("class_weights")?.as_str() {
        "none" => None,
        s => {
            let v: Vec<f64> = s
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("class_weights"))?;
            Some(<[f64; 3]>::try_from(v).map_err(|_| bad("class_weights"))?)
        }
    };
    let features = FeatureConfig::from_names(get("features")?.split(','))?;

    let mut weights: [BTreeMap<String, f64>; 3] = Default::default();
    let mut bias = [0.0; 3];
    let mut seen = [false; 3];
    let mut current: Option<usize> = None;
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("CLASS ") {
            let (name, b) = rest
                .split_once(' ')
                .ok_or_else(|| Error::parse(idx + 1, "expected CLASS name bias"))?;
            let c: Category = name.parse().map_err(|e: Error| Error::parse(idx + 1, e.to_string()))?;
            if seen[c.index()] {
                return Err(Error::parse(idx + 1, format!("class {name} appears twice")));
            }
            seen[c.index()] = true;
            bias[c.index()] = b
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad bias {b:?}")))?;
            current = Some(c.index());
            continue;
        }
        let c = current.ok_or_else(|| Error::parse(idx + 1, "weight line before any CLASS line"))?;
        let (f, w) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(idx + 1, "expected feature<TAB>weight"))?;
        let w: f64 = w
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("bad weight {w:?}")))?;
        weights[c].insert(f.to_string(), w);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Model(format!(
            "class {} missing from model",
            Category::ALL[missing]
        )));
    }
    let params = ClassifierParams {
        lambda,
        epochs,
        seed,
        class_weights,
    };
    params.validate()?;
    Ok(ClassifierModel::from_parts(weights, bias, params, features))
}
