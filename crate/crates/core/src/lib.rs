//! Tweet classification pipeline for aggression / grief / other: tokenizer,
//! domain-adapted tagger, Model 1 glossary induction, affect features, a
//! linear max-margin classifier and annotator-agreement tools.

pub mod affect;
pub mod agreement;
pub mod align;
pub mod classify;
pub mod config;
pub mod corpus;
pub mod error;
pub mod pipeline;
pub mod postag;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};

pub use affect::{AffectLexicon, AffectScores, AffectVector};
pub use agreement::{AnnotationPair, KappaResult, LabelLevel};
pub use align::{Glossary, ParallelPair, TranslationTable};
pub use classify::{ClassifierModel, ClassifierParams, EvalReport, FeatureConfig, FeatureVector, Prediction};
pub use config::PipelineConfig;
pub use corpus::{Annotation, Category, Codebook, LabeledCorpus, Token, TokenKind, Tweet};
pub use postag::{Domain, Tag, TaggedSentence, TaggerModel};
