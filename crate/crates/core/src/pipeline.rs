//! End-to-end run: align, extract a glossary, train the tagger, featurize
//! tweets, train the classifier and evaluate it on a held-out split.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::affect::{affect_features, AffectLexicon};
use crate::align::{extract_glossary, train_model1, Glossary, ParallelPair, TranslationTable};
use crate::classify::{
    evaluate, extract_features, report_from_predictions, train_classifier, ClassifierModel, EvalReport, FeatureConfig,
    FeatureVector,
};
use crate::config::PipelineConfig;
use crate::corpus::{tokenize, Category, LabeledCorpus};
use crate::error::{Error, Result};
use crate::postag::{tag, tagger_accuracy, train_tagger, Domain, TaggedSentence, TaggerFeatures, TaggerModel};
use crate::sampling;

/// One featurized tweet, as written to feature files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: String,
    pub label: Option<Category>,
    pub features: FeatureVector,
}

/// Tokenizes, tags and featurizes every tweet. Labels are aligned with
/// `corpus.tweets()`.
pub fn featurize(
    corpus: &LabeledCorpus,
    labels: &[Option<Category>],
    tagger: &TaggerModel,
    lexicon: &AffectLexicon,
    glossary: Option<&Glossary>,
    features: &FeatureConfig,
) -> Result<Vec<FeatureRecord>> {
    if labels.len() != corpus.len() {
        return Err(Error::invalid(format!(
            "{} labels for {} tweets",
            labels.len(),
            corpus.len()
        )));
    }
    corpus
        .tweets()
        .iter()
        .zip(labels)
        .map(|(t, label)| {
            let tokens = tokenize(&t.text);
            let tags = tag(tagger, &tokens, Domain::Target);
            let aff = affect_features(&tokens, lexicon, glossary);
            Ok(FeatureRecord {
                id: t.id.clone(),
                label: *label,
                features: extract_features(&tokens, &tags, &aff, features)?,
            })
        })
        .collect()
}

/// One JSON object per line.
pub fn write_features<W: Write>(records: &[FeatureRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_features<R: BufRead>(reader: R) -> Result<Vec<FeatureRecord>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: FeatureRecord = serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        // Normalizes away any explicit zeros in hand-written files.
        let features = r.features.iter().map(|(k, v)| (k.to_string(), v)).collect();
        out.push(FeatureRecord { features, ..r });
    }
    Ok(out)
}

/// Labeled records as classifier training pairs; unlabeled ones are skipped.
pub fn labeled(records: &[FeatureRecord]) -> Vec<(FeatureVector, Category)> {
    records
        .iter()
        .filter_map(|r| Some((r.features.clone(), r.label?)))
        .collect()
}

pub struct PipelineInputs {
    pub corpus: LabeledCorpus,
    pub tagged_source: Vec<TaggedSentence>,
    pub tagged_target: Vec<TaggedSentence>,
    pub parallel: Vec<ParallelPair>,
    pub lexicon: AffectLexicon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub parallel_pairs: usize,
    pub glossary_entries: usize,
    pub tagger_train_sentences: usize,
    pub tagger_test_sentences: usize,
    /// Token accuracy on held-out target sentences, when any were held out.
    pub tagger_accuracy: Option<f64>,
    pub tweets: usize,
    pub labeled_tweets: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Predicting the most frequent training class for every test tweet.
    pub majority_baseline: EvalReport,
    pub evaluation: EvalReport,
}

pub struct PipelineOutputs {
    pub table: TranslationTable,
    pub glossary: Glossary,
    pub tagger: TaggerModel,
    pub features: Vec<FeatureRecord>,
    pub classifier: ClassifierModel,
    pub report: PipelineReport,
}

fn majority_class(labels: impl Iterator<Item = Category>) -> Category {
    let mut counts = [0usize; 3];
    for c in labels {
        counts[c.index()] += 1;
    }
    // First maximum, so ties follow class priority.
    let best = (0..3).fold(0, |b, c| if counts[c] > counts[b] { c } else { b });
    Category::ALL[best]
}

pub fn run_pipeline(inputs: &PipelineInputs, config: &PipelineConfig) -> Result<PipelineOutputs> {
    config.validate()?;
    let al = &config.aligner;
    log::info!("aligning {} parallel pairs", inputs.parallel.len());
    let table = train_model1(&inputs.parallel, al.iterations, al.use_null)?;
    let glossary = extract_glossary(&table, al.threshold, al.min_count)?;
    log::info!("glossary has {} entries", glossary.len());

    let tc = &config.tagger;
    let (train_idx, test_idx) = sampling::holdout_split(inputs.tagged_target.len(), tc.split, tc.seed);
    let target_train: Vec<TaggedSentence> = train_idx.iter().map(|&i| inputs.tagged_target[i].clone()).collect();
    let target_test: Vec<TaggedSentence> = test_idx.iter().map(|&i| inputs.tagged_target[i].clone()).collect();
    let tagger_features = TaggerFeatures {
        augment: tc.augment,
        ..TaggerFeatures::default()
    };
    let tagger = train_tagger(
        &inputs.tagged_source,
        &target_train,
        tagger_features,
        tc.epochs,
        tc.seed,
    )?;
    let tagger_acc = if target_test.is_empty() {
        None
    } else {
        Some(tagger_accuracy(&tagger, &target_test)?)
    };

    let cc = &config.classifier;
    let labels = inputs.corpus.gold_labels(&config.eval.gold_policy());
    let gloss_for_affect = cc.affect_glossary.then_some(&glossary);
    let features = featurize(
        &inputs.corpus,
        &labels,
        &tagger,
        &inputs.lexicon,
        gloss_for_affect,
        &cc.features(),
    )?;
    let data = labeled(&features);
    if data.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 labeled tweets, found {}",
            data.len()
        )));
    }
    let (train_idx, test_idx) = sampling::holdout_split(data.len(), config.eval.test_ratio, config.eval.seed);
    let train: Vec<_> = train_idx.iter().map(|&i| data[i].clone()).collect();
    let test: Vec<_> = test_idx.iter().map(|&i| data[i].clone()).collect();
    log::info!(
        "training classifier on {} tweets, testing on {}",
        train.len(),
        test.len()
    );
    let classifier = train_classifier(&train, &cc.params(), cc.features())?;
    let evaluation = evaluate(&classifier, &test)?;
    let majority = majority_class(train.iter().map(|(_, c)| *c));
    let gold: Vec<Category> = test.iter().map(|(_, c)| *c).collect();
    let majority_baseline = report_from_predictions(&gold, &vec![majority; gold.len()])?;

    let report = PipelineReport {
        config: config.clone(),
        parallel_pairs: inputs.parallel.len(),
        glossary_entries: glossary.len(),
        tagger_train_sentences: inputs.tagged_source.len() + target_train.len(),
        tagger_test_sentences: target_test.len(),
        tagger_accuracy: tagger_acc,
        tweets: inputs.corpus.len(),
        labeled_tweets: data.len(),
        train_size: train.len(),
        test_size: test.len(),
        majority_baseline,
        evaluation,
    };
    Ok(PipelineOutputs {
        table,
        glossary,
        tagger,
        features,
        classifier,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn inputs() -> PipelineInputs {
        PipelineInputs {
            corpus: synth::planted_corpus(150, 7),
            tagged_source: synth::standard_sentences(60, 8),
            tagged_target: synth::tagged_tweets(60, 9),
            parallel: synth::parallel_pairs(300, 10),
            lexicon: synth::lexicon(),
        }
    }

    #[test]
    fn synthetic_run_beats_majority() {
        let out = run_pipeline(&inputs(), &PipelineConfig::default()).unwrap();
        let r = &out.report;
        assert_eq!((r.train_size, r.test_size), (105, 45));
        assert!(r.evaluation.macro_f1 >= 0.9, "{}", r.evaluation.macro_f1);
        assert!(r.evaluation.macro_f1 > r.majority_baseline.macro_f1);
        assert!(out.glossary.get("opp").is_some_and(|e| e.gloss == "enemy"));
        assert!(r.tagger_accuracy.unwrap() > 0.9);
    }

    #[test]
    fn identical_runs() {
        let a = run_pipeline(&inputs(), &PipelineConfig::default()).unwrap();
        let b = run_pipeline(&inputs(), &PipelineConfig::default()).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.classifier, b.classifier);
        assert_eq!(a.tagger, b.tagger);
    }

    #[test]
    fn feature_file_round_trip() {
        let out = run_pipeline(&inputs(), &PipelineConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_features(&out.features, &mut buf).unwrap();
        assert_eq!(read_features(&buf[..]).unwrap(), out.features);
        let hand = "{\"id\":\"x\",\"label\":null,\"features\":{\"uni:a\":0.0,\"uni:b\":2.0}}\n";
        let r = read_features(hand.as_bytes()).unwrap();
        assert_eq!(r[0].features.len(), 1);
        assert!(matches!(
            read_features("\n{oops\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn majority_ties_follow_priority() {
        use Category::*;
        assert_eq!(majority_class([Other, Grief].into_iter()), Grief);
        assert_eq!(majority_class([Other, Other, Aggression].into_iter()), Other);
    }
}
