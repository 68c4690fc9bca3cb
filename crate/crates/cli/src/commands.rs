use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use chrono::{DateTime, Utc};
use serde_json::json;
use streetlex::affect::{affect_features, load_lexicon, AffectLexicon};
use streetlex::agreement::{agreement_matrix, cohen_kappa, disagreements, AnnotationPair, LabelLevel};
use streetlex::align::{
    extract_glossary, read_glossary, read_parallel, read_table, train_model1, write_glossary, write_table,
};
use streetlex::classify::{self, cross_validate, predict as classify_one, train_classifier};
use streetlex::config::PipelineConfig;
use streetlex::corpus::{read_annotations, tokenize, window_filter, write_corpus, CorpusFormat};
use streetlex::pipeline::{
    featurize as featurize_corpus, labeled, read_features, run_pipeline, write_features, PipelineInputs,
};
use streetlex::postag::{self, read_tagged, train_tagger, Domain, TaggerFeatures};
use streetlex::{Category, Glossary};

use crate::context::Context;
use crate::{text, Format};
use crate::{
    AffectArgs, AlignTrainArgs, ClassifierFlags, CollapseArgs, EvaluateArgs, FeaturizeArgs, GlossaryArgs, IngestArgs,
    KappaArgs, PipelineArgs, PredictArgs, TagArgs, TagTrainArgs, TrainArgs, XvalArgs,
};

fn json_line(w: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn json_pretty(w: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

/// A report with the effective configuration attached for provenance.
fn report_json(config: &PipelineConfig, report: &impl serde::Serialize) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(report)?;
    if let serde_json::Value::Object(m) = &mut v {
        m.insert("config".into(), serde_json::to_value(config)?);
    }
    Ok(v)
}

fn report_text(config: &PipelineConfig, body: String) -> String {
    format!("{body}\n# effective configuration\n{}", config.to_toml())
}

fn parse_instant(s: &str) -> Result<DateTime<Utc>> {
    Ok(DateTime::parse_from_rfc3339(s)
        .with_context(|| format!("bad RFC 3339 timestamp {s:?}"))?
        .with_timezone(&Utc))
}

pub fn ingest(ctx: &Context, a: IngestArgs) -> Result<()> {
    let mut corpus = ctx.corpus(a.corpus)?;
    if a.from.is_some() || a.to.is_some() {
        let start = a
            .from
            .as_deref()
            .map(parse_instant)
            .transpose()?
            .unwrap_or(DateTime::<Utc>::MIN_UTC);
        let end =
            a.to.as_deref()
                .map(parse_instant)
                .transpose()?
                .unwrap_or(DateTime::<Utc>::MAX_UTC);
        corpus = window_filter(&corpus, start, end)?;
    }
    let format: CorpusFormat = a.output_format.into();
    ctx.emit(a.output.as_deref(), |w| Ok(write_corpus(&corpus, format, w)?))?;
    let counts: serde_json::Map<String, serde_json::Value> = corpus
        .category_counts()
        .into_iter()
        .map(|(c, n)| (c.as_str().to_string(), json!(n)))
        .collect();
    let summary = json!({
        "tweets": corpus.len(),
        "annotations": corpus.annotations().len(),
        "annotators": corpus.annotators(),
        "categories": counts,
    });
    // The corpus owns stdout unless it went to a file.
    if a.output.is_some() {
        match ctx.format {
            Format::Json => json_pretty(&mut std::io::stdout(), &summary)?,
            Format::Text => println!(
                "{} tweets, {} annotations, annotators {}",
                corpus.len(),
                corpus.annotations().len(),
                corpus.annotators().join(",")
            ),
        }
    } else {
        log::info!("{summary}");
    }
    Ok(())
}

pub fn kappa(ctx: &Context, a: KappaArgs) -> Result<()> {
    let level: LabelLevel = a.level.parse()?;
    let pair = match (a.files.as_slice(), a.annotators.as_slice()) {
        ([fa, fb], []) => {
            let codebook = ctx.codebook(a.corpus.codebook)?;
            let format = a
                .corpus
                .corpus_format
                .map_or(ctx.config.paths.corpus_format, Into::into);
            let xa = ctx.read(fa, |r| read_annotations(r, format, &codebook))?;
            let xb = ctx.read(fb, |r| read_annotations(r, format, &codebook))?;
            AnnotationPair::from_annotations(&xa, &xb, &codebook, level)?
        }
        ([], [x, y]) => {
            let corpus = ctx.corpus(a.corpus)?;
            AnnotationPair::from_corpus(&corpus, x, y, level)?
        }
        _ => bail!("kappa needs two annotation files, or --annotators A,B with a corpus"),
    };
    let k = cohen_kappa(&pair)?;
    let m = agreement_matrix(&pair);
    let diffs = disagreements(&pair);
    let mut out = std::io::stdout();
    match ctx.format {
        Format::Json => {
            let mut v = json!({
                "kappa": k.kappa,
                "observed": k.observed_agreement,
                "expected": k.expected_agreement,
                "n": k.n_items,
                "matrix": m,
            });
            if a.disagreements {
                v["disagreements"] = json!(diffs);
            }
            json_pretty(&mut out, &report_json(&ctx.config, &v)?)?;
        }
        Format::Text => {
            let mut body = text::kappa(&k, &m);
            if a.disagreements {
                for d in diffs {
                    body.push_str(&format!("{}\t{}\t{}\n", d.id, d.label_a, d.label_b));
                }
            }
            write!(out, "{}", report_text(&ctx.config, body))?;
        }
    }
    Ok(())
}

pub fn collapse(ctx: &Context, a: CollapseArgs) -> Result<()> {
    let codebook = ctx.codebook(a.codebook)?;
    if let Some(input) = &a.input {
        let anns = ctx.read(input, |r| read_annotations(r, a.input_format.into(), &codebook))?;
        let rows: Vec<(&streetlex::Annotation, Category)> = anns
            .iter()
            .map(|x| Ok((x, codebook.collapse(&x.fine_code)?)))
            .collect::<streetlex::Result<_>>()?;
        return ctx.emit(a.output.as_deref(), |w| {
            for (x, c) in &rows {
                match ctx.format {
                    Format::Json => json_line(
                        w,
                        &json!({"tweet_id": x.tweet_id, "annotator_id": x.annotator_id, "fine_code": x.fine_code, "category": c}),
                    )?,
                    Format::Text => writeln!(w, "{}\t{}\t{}\t{}", x.tweet_id, x.annotator_id, x.fine_code, c)?,
                }
            }
            Ok(())
        });
    }
    if a.codes.is_empty() {
        bail!("collapse needs --input or one or more fine codes");
    }
    let rows = a
        .codes
        .iter()
        .map(|code| Ok((code, codebook.collapse(code)?)))
        .collect::<streetlex::Result<Vec<_>>>()?;
    ctx.emit(a.output.as_deref(), |w| {
        for (code, c) in &rows {
            match ctx.format {
                Format::Json => json_line(w, &json!({"fine_code": code, "category": c}))?,
                Format::Text => writeln!(w, "{code}\t{c}")?,
            }
        }
        Ok(())
    })
}

pub fn tag_train(ctx: &Context, a: TagTrainArgs) -> Result<()> {
    let p = &ctx.config.paths;
    let source = ctx.pick(a.source, &p.tagged_source, "source-domain tagged corpus (--source)")?;
    let target = ctx.pick(a.target, &p.tagged_target, "target-domain tagged corpus (--target)")?;
    let source = ctx.read(&source, read_tagged)?;
    let target = ctx.read(&target, read_tagged)?;
    let tc = &ctx.config.tagger;
    let features = TaggerFeatures {
        augment: tc.augment && !a.no_augment,
        ..TaggerFeatures::default()
    };
    let model = train_tagger(&source, &target, features, a.epochs.unwrap_or(tc.epochs), tc.seed)?;
    log::info!("trained on {} + {} sentences", source.len(), target.len());
    ctx.write_atomic(&a.output, |w| Ok(postag::write_model(&model, w)?))
}

pub fn tag(ctx: &Context, a: TagArgs) -> Result<()> {
    let model_path = ctx.pick(a.model, &ctx.config.paths.tagger_model, "tagger model (--model)")?;
    let model = ctx.read(&model_path, postag::read_model)?;
    let domain: Domain = a.domain.parse()?;
    let lines = ctx.lines(a.input.as_deref())?;
    ctx.emit(a.output.as_deref(), |w| {
        for line in &lines {
            let tokens = tokenize(line);
            let tags = postag::tag(&model, &tokens, domain);
            match ctx.format {
                Format::Json => {
                    let items: Vec<_> = tokens
                        .iter()
                        .zip(&tags)
                        .map(|(t, g)| json!({"token": t.surface, "tag": g.symbol(), "kind": t.kind}))
                        .collect();
                    json_line(w, &items)?;
                }
                Format::Text => {
                    for (t, g) in tokens.iter().zip(&tags) {
                        writeln!(w, "{}\t{}", t.surface, g)?;
                    }
                    writeln!(w)?;
                }
            }
        }
        Ok(())
    })
}

pub fn align_train(ctx: &Context, a: AlignTrainArgs) -> Result<()> {
    let input = ctx.pick(a.input, &ctx.config.paths.parallel, "parallel corpus (--input)")?;
    let pairs = ctx.read(&input, read_parallel)?;
    let al = &ctx.config.aligner;
    let table = train_model1(&pairs, a.iterations.unwrap_or(al.iterations), al.use_null && !a.no_null)?;
    if let Some(ll) = table.log_likelihoods().last() {
        log::info!("final log-likelihood {ll}");
    }
    ctx.write_atomic(&a.output, |w| Ok(write_table(&table, w)?))
}

pub fn glossary(ctx: &Context, a: GlossaryArgs) -> Result<()> {
    let table = ctx.read(&a.table, read_table)?;
    let al = &ctx.config.aligner;
    let g = extract_glossary(
        &table,
        a.threshold.unwrap_or(al.threshold),
        a.min_count.unwrap_or(al.min_count),
    )?;
    ctx.emit(a.output.as_deref(), |w| Ok(write_glossary(&g, w)?))
}

fn optional_glossary(ctx: &Context, flag: Option<PathBuf>, disabled: bool) -> Result<Option<Glossary>> {
    if disabled {
        return Ok(None);
    }
    match flag.or_else(|| ctx.config.paths.glossary.as_ref().map(|p| ctx.resolve(p))) {
        Some(p) => Ok(Some(ctx.read(&p, read_glossary)?)),
        None => Ok(None),
    }
}

fn lexicon(ctx: &Context, flag: Option<PathBuf>) -> Result<AffectLexicon> {
    let path = ctx.pick(flag, &ctx.config.paths.lexicon, "affect lexicon (--lexicon)")?;
    ctx.read(&path, load_lexicon)
}

pub fn affect(ctx: &Context, a: AffectArgs) -> Result<()> {
    let lex = lexicon(ctx, a.lexicon)?;
    let gloss = optional_glossary(ctx, a.glossary, a.no_glossary || !ctx.config.classifier.affect_glossary)?;
    let lines = ctx.lines(a.input.as_deref())?;
    ctx.emit(a.output.as_deref(), |w| {
        for line in &lines {
            let v = affect_features(&tokenize(line), &lex, gloss.as_ref());
            match ctx.format {
                Format::Json => json_line(w, &v)?,
                Format::Text => {
                    write!(w, "coverage {:.4} ({}/{})", v.coverage, v.matched, v.eligible)?;
                    if let Some(stats) = v.stats {
                        for (name, s) in streetlex::affect::DIMENSIONS.iter().zip(stats) {
                            write!(w, "  {name} {:.3} [{:.3}, {:.3}]", s.mean, s.min, s.max)?;
                        }
                    }
                    writeln!(w)?;
                }
            }
        }
        Ok(())
    })
}

pub fn featurize(ctx: &Context, a: FeaturizeArgs) -> Result<()> {
    let corpus = ctx.corpus(a.corpus)?;
    let tagger_path = ctx.pick(
        a.tagger_model,
        &ctx.config.paths.tagger_model,
        "tagger model (--tagger-model)",
    )?;
    let tagger = ctx.read(&tagger_path, postag::read_model)?;
    let lex = lexicon(ctx, a.lexicon)?;
    let cc = &ctx.config.classifier;
    let gloss = optional_glossary(ctx, a.glossary, !cc.affect_glossary)?;
    let labels = corpus.gold_labels(&ctx.config.eval.gold_policy());
    let records = featurize_corpus(&corpus, &labels, &tagger, &lex, gloss.as_ref(), &cc.features())?;
    ctx.write_atomic(&a.output, |w| Ok(write_features(&records, w)?))
}

/// The config with classifier flags applied, so reports echo what ran.
fn with_flags(ctx: &Context, f: &ClassifierFlags) -> PipelineConfig {
    let mut cfg = ctx.config.clone();
    let c = &mut cfg.classifier;
    if let Some(l) = f.lambda {
        c.lambda = l;
    }
    if let Some(e) = f.epochs {
        c.epochs = e;
    }
    if let [x, y, z] = f.class_weights[..] {
        c.class_weights = Some([x, y, z]);
    }
    cfg
}

fn labeled_features(ctx: &Context, path: &Path) -> Result<Vec<(streetlex::FeatureVector, Category)>> {
    let records = ctx.read(path, read_features)?;
    let data = labeled(&records);
    if data.is_empty() {
        bail!("{} has no labeled records", path.display());
    }
    Ok(data)
}

pub fn train(ctx: &Context, a: TrainArgs) -> Result<()> {
    let data = labeled_features(ctx, &a.features)?;
    let cfg = with_flags(ctx, &a.flags);
    let model = train_classifier(&data, &cfg.classifier.params(), cfg.classifier.features())?;
    ctx.write_atomic(&a.output, |w| Ok(classify::write_model(&model, w)?))
}

fn load_classifier(ctx: &Context, flag: Option<PathBuf>) -> Result<streetlex::ClassifierModel> {
    let path = ctx.pick(flag, &ctx.config.paths.classifier_model, "classifier model (--model)")?;
    ctx.read(&path, classify::read_model)
}

pub fn predict(ctx: &Context, a: PredictArgs) -> Result<()> {
    let model = load_classifier(ctx, a.model)?;
    let records = ctx.read(&a.features, read_features)?;
    ctx.emit(a.output.as_deref(), |w| {
        for r in &records {
            let p = classify_one(&model, &r.features);
            match ctx.format {
                Format::Json => {
                    let scores: serde_json::Map<String, serde_json::Value> = Category::ALL
                        .iter()
                        .zip(p.scores)
                        .map(|(c, s)| (c.as_str().to_string(), json!(s)))
                        .collect();
                    json_line(w, &json!({"id": r.id, "category": p.category, "scores": scores}))?;
                }
                Format::Text => writeln!(w, "{}\t{}", r.id, p.category)?,
            }
        }
        Ok(())
    })
}

pub fn evaluate(ctx: &Context, a: EvaluateArgs) -> Result<()> {
    let model = load_classifier(ctx, a.model)?;
    let data = labeled_features(ctx, &a.features)?;
    let report = classify::evaluate(&model, &data)?;
    ctx.emit(a.output.as_deref(), |w| match ctx.format {
        Format::Json => json_pretty(w, &report_json(&ctx.config, &report)?),
        Format::Text => Ok(write!(w, "{}", report_text(&ctx.config, text::eval(&report)))?),
    })
}

pub fn xval(ctx: &Context, a: XvalArgs) -> Result<()> {
    let data = labeled_features(ctx, &a.features)?;
    let mut cfg = with_flags(ctx, &a.flags);
    if let Some(k) = a.k {
        cfg.eval.folds = k;
    }
    let report = cross_validate(
        &data,
        cfg.eval.folds,
        &cfg.classifier.params(),
        cfg.classifier.features(),
    )?;
    ctx.emit(a.output.as_deref(), |w| match ctx.format {
        Format::Json => json_pretty(w, &report_json(&cfg, &report)?),
        Format::Text => Ok(write!(w, "{}", report_text(&cfg, text::cv(&report)))?),
    })
}

pub fn pipeline(ctx: &Context, a: PipelineArgs) -> Result<()> {
    let mut config = ctx.config.clone();
    if let Some(d) = &a.output_dir {
        config.paths.output_dir = d.clone();
    }
    let p = &config.paths;
    let corpus = ctx.corpus(crate::CorpusArgs {
        corpus: None,
        corpus_format: None,
        codebook: None,
    })?;
    let tagged_source = ctx.read(&ctx.pick(None, &p.tagged_source, "paths.tagged_source")?, read_tagged)?;
    let tagged_target = ctx.read(&ctx.pick(None, &p.tagged_target, "paths.tagged_target")?, read_tagged)?;
    let parallel = ctx.read(&ctx.pick(None, &p.parallel, "paths.parallel")?, read_parallel)?;
    let lexicon = lexicon(ctx, None)?;
    let inputs = PipelineInputs {
        corpus,
        tagged_source,
        tagged_target,
        parallel,
        lexicon,
    };
    let out = run_pipeline(&inputs, &config)?;
    let dir = a.output_dir.unwrap_or_else(|| ctx.resolve(&config.paths.output_dir));
    ctx.write_atomic(&dir.join("alignment.ttable"), |w| Ok(write_table(&out.table, w)?))?;
    ctx.write_atomic(&dir.join("glossary.tsv"), |w| Ok(write_glossary(&out.glossary, w)?))?;
    ctx.write_atomic(&dir.join("tagger.model"), |w| Ok(postag::write_model(&out.tagger, w)?))?;
    ctx.write_atomic(&dir.join("features.jsonl"), |w| Ok(write_features(&out.features, w)?))?;
    ctx.write_atomic(&dir.join("classifier.model"), |w| {
        Ok(classify::write_model(&out.classifier, w)?)
    })?;
    ctx.write_atomic(&dir.join("report.json"), |w| json_pretty(w, &out.report))?;
    let rendered = text::pipeline(&out.report);
    ctx.write_atomic(&dir.join("report.txt"), |w| Ok(w.write_all(rendered.as_bytes())?))?;
    let mut stdout = std::io::stdout();
    match ctx.format {
        Format::Json => json_pretty(&mut stdout, &out.report)?,
        Format::Text => write!(stdout, "{rendered}")?,
    }
    Ok(())
}
