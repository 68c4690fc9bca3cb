//! Pipeline configuration: a TOML file with one table per stage. Every key
//! has a default, so an empty file is a valid config.
//!
//! ```toml
//! [paths]
//! corpus = "corpus.jsonl"
//! corpus_format = "jsonl"
//! tagged_source = "tagged_source.tsv"
//! tagged_target = "tagged_target.tsv"
//! parallel = "parallel.tsv"
//! lexicon = "lexicon.tsv"
//! output_dir = "out"
//!
//! [tagger]
//! epochs = 10
//! split = 0.2
//!
//! [aligner]
//! iterations = 10
//! threshold = 0.5
//!
//! [classifier]
//! lambda = 0.01
//! affect_glossary = true
//!
//! [eval]
//! test_ratio = 0.3
//! folds = 5
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierParams, FeatureConfig};
use crate::corpus::{CorpusFormat, GoldPolicy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub tagger: TaggerConfig,
    pub aligner: AlignerConfig,
    pub classifier: ClassifierConfig,
    pub eval: EvalConfig,
}

/// Relative paths are resolved against the config file's directory by the
/// caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub corpus_format: CorpusFormat,
    /// Fine-code table; the built-in codebook when unset.
    pub codebook: Option<PathBuf>,
    pub tagged_source: Option<PathBuf>,
    pub tagged_target: Option<PathBuf>,
    pub parallel: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Glossary read by stand-alone `affect` and `featurize` runs.
    pub glossary: Option<PathBuf>,
    pub tagger_model: Option<PathBuf>,
    pub classifier_model: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            corpus: None,
            corpus_format: CorpusFormat::Jsonl,
            codebook: None,
            tagged_source: None,
            tagged_target: None,
            parallel: None,
            lexicon: None,
            glossary: None,
            tagger_model: None,
            classifier_model: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Share of target-domain sentences held out to measure tagging accuracy.
    pub split: f64,
    pub augment: bool,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            epochs: 10,
            seed: 1,
            split: 0.2,
            augment: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignerConfig {
    pub iterations: usize,
    pub threshold: f64,
    pub min_count: usize,
    pub use_null: bool,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        AlignerConfig {
            iterations: 10,
            threshold: 0.5,
            min_count: 2,
            use_null: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub lexical: bool,
    pub pos: bool,
    pub emoticon_hashtag: bool,
    pub affect: bool,
    /// Fall back to the glossary for tokens missing from the lexicon.
    pub affect_glossary: bool,
    /// Loss weights for aggression, grief, other.
    pub class_weights: Option<[f64; 3]>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let p = ClassifierParams::default();
        ClassifierConfig {
            lambda: p.lambda,
            epochs: p.epochs,
            seed: p.seed,
            lexical: true,
            pos: true,
            emoticon_hashtag: true,
            affect: true,
            affect_glossary: true,
            class_weights: None,
        }
    }
}

impl ClassifierConfig {
    pub fn params(&self) -> ClassifierParams {
        ClassifierParams {
            lambda: self.lambda,
            epochs: self.epochs,
            seed: self.seed,
            class_weights: self.class_weights,
        }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig {
            lexical: self.lexical,
            pos: self.pos,
            emoticon_hashtag: self.emoticon_hashtag,
            affect: self.affect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub test_ratio: f64,
    pub folds: usize,
    pub seed: u64,
    /// `majority`, or an annotator id whose labels are taken as gold.
    pub gold: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            test_ratio: 0.3,
            folds: 5,
            seed: 1,
            gold: "majority".into(),
        }
    }
}

impl EvalConfig {
    pub fn gold_policy(&self) -> GoldPolicy {
        if self.gold == "majority" {
            GoldPolicy::Majority
        } else {
            GoldPolicy::Annotator(self.gold.clone())
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text`, then applies `section.key=value` overrides before
    /// type-checking. Values are read as TOML literals when they parse as one
    /// and as bare strings otherwise.
    pub fn from_toml_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(config_err)?;
        for (key, value) in overrides {
            let (section, field) = key
                .split_once('.')
                .ok_or_else(|| Error::Config(format!("override key {key:?} must look like section.key")))?;
            let parsed = format!("v = {value}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.clone()));
            let entry = table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let toml::Value::Table(sec) = entry else {
                return Err(Error::Config(format!("{section:?} is not a table")));
            };
            sec.insert(field.to_string(), parsed);
        }
        let cfg: PipelineConfig = toml::Value::Table(table).try_into().map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Points every stage at one seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.tagger.seed = seed;
        self.classifier.seed = seed;
        self.eval.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.tagger.epochs == 0 {
            return fail("tagger.epochs must be positive".into());
        }
        if !(0.0..1.0).contains(&self.tagger.split) {
            return fail(format!("tagger.split must be in [0, 1), got {}", self.tagger.split));
        }
        if self.aligner.iterations == 0 {
            return fail("aligner.iterations must be positive".into());
        }
        if !(self.aligner.threshold > 0.0 && self.aligner.threshold <= 1.0) {
            return fail(format!(
                "aligner.threshold must be in (0, 1], got {}",
                self.aligner.threshold
            ));
        }
        self.classifier
            .params()
            .validate()
            .map_err(|e| Error::Config(format!("classifier: {e}")))?;
        if !(self.eval.test_ratio > 0.0 && self.eval.test_ratio < 1.0) {
            return fail(format!(
                "eval.test_ratio must be in (0, 1), got {}",
                self.eval.test_ratio
            ));
        }
        if self.eval.folds < 2 {
            return fail(format!("eval.folds must be at least 2, got {}", self.eval.folds));
        }
        Ok(())
    }
}
