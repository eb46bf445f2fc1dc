use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid language id {0:?}: expected 2-3 lowercase ASCII letters")]
    InvalidLanguage(String),

    #[error("duplicate fact_id {fact_id} in {language} source")]
    DuplicateFact { fact_id: String, language: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("unknown language {0}")]
    UnknownLanguage(String),

    #[error("no scores for ({fact_id}, {language})")]
    UnknownRecord { fact_id: String, language: String },

    #[error("missing scores for ({fact_id}, {language})")]
    MissingScores { fact_id: String, language: String },

    #[error("duplicate scores for ({fact_id}, {language})")]
    DuplicateScores { fact_id: String, language: String },

    #[error(
        "score length mismatch for ({fact_id}, {language}): expected {expected}, got {actual}"
    )]
    ScoreLength {
        fact_id: String,
        language: String,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite score for ({fact_id}, {language}) at candidate {index}")]
    NonFiniteScore {
        fact_id: String,
        language: String,
        index: usize,
    },

    #[error("mixed model ids in score file: {first} and {other}")]
    MixedModels { first: String, other: String },

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("need at least {needed} samples, got {actual}")]
    TooFewSamples { needed: usize, actual: usize },

    #[error("tokenizer mismatch: {0} vs {1}")]
    TokenizerMismatch(String, String),

    #[error("value {value} for {what} outside [0, 1]")]
    OutOfRange { what: String, value: f64 },

    #[error("conflicting similarity for ({a}, {b}) feature {feature}: {first} vs {second}")]
    ConflictingSimilarity {
        a: String,
        b: String,
        feature: String,
        first: f64,
        second: f64,
    },

    #[error("missing {phase} logits for ({query_id}, {language})")]
    MissingPhase {
        query_id: String,
        language: String,
        phase: &'static str,
    },

    #[error("degenerate partition at threshold {threshold}: {high} high-group and {low} low-group languages")]
    DegeneratePartition {
        threshold: f64,
        high: usize,
        low: usize,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl std::fmt::Display,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}
