use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// A record or line that does not parse. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate tweet id {id:?}")]
    DuplicateTweet { line: usize, id: String },

    #[error("line {line}: annotation references unknown tweet id {id:?}")]
    UnknownTweet { line: usize, id: String },

    #[error("line {line}: duplicate annotation for tweet {tweet_id:?} by annotator {annotator_id:?}")]
    DuplicateAnnotation {
        line: usize,
        tweet_id: String,
        annotator_id: String,
    },

    #[error("unknown fine code {code:?}{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    UnknownCode { code: String, line: Option<usize> },

    #[error("line {line}: {word:?} has {dimension} value {value} outside [{min}, {max}]")]
    AffectRange {
        line: usize,
        word: String,
        dimension: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("kappa undefined: expected agreement is 1 (both annotators use a single identical label)")]
    KappaUndefined,

    #[error("token/tag arity mismatch: {tokens} tokens, {tags} tags")]
    Arity { tokens: usize, tags: usize },

    #[error("unknown tag {0:?}")]
    UnknownTag(String),

    #[error("unknown category {0:?}")]
    UnknownCategory(String),

    #[error("invalid model file: {0}")]
    Model(String),

    #[error("config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
