//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A character in the input matches no prefix of the Wylie letter inventory.
    /// The position is a byte offset into the offending syllable.
    #[error("unknown character at byte {0} of syllable")]
    UnknownCharacter(usize),

    /// The letter sequence admits no valid slot assignment.
    #[error("not a Tibetan syllable: {0}")]
    NotTibetan(String),

    /// A stem-level operation was applied to a syllable that failed parsing.
    #[error("foreign syllable: {0}")]
    ForeignSyllable(String),

    /// A training set contains only one label.
    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    /// Parallel sequences have different lengths.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A model was built with a different feature template than the current one.
    #[error("feature template mismatch: model has {found}, expected {expected}")]
    TemplateMismatch { found: String, expected: String },

    /// An alignment operation received an empty document.
    #[error("empty document: {0}")]
    EmptyDocument(String),

    /// Chunking parameters cannot cover the inputs safely.
    #[error("bad chunking: {0}")]
    BadChunking(String),

    /// The brute-force aligner guard was exceeded.
    #[error("input too large for exhaustive alignment: {0} position pairs (limit {1})")]
    TooLarge(usize, usize),

    /// Variant classification was asked to compare two absent syllables.
    #[error("both sides absent in variant classification")]
    BothAbsent,

    /// A sigla delimiter was left unbalanced during cleaning.
    #[error("unbalanced sigla delimiter at byte {0}")]
    UnbalancedSigla(usize),

    /// Two loaded documents share an identifier.
    #[error("duplicate document id: {0}")]
    DuplicateDocId(String),

    /// Evaluation was requested over an empty test set.
    #[error("empty test set")]
    EmptyTestSet,

    /// A corpus for training was empty.
    #[error("empty training corpus")]
    EmptyCorpus,

    /// Alignment parameters violate their invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A data file (letter tables, rules, costs, lexicons) failed to parse.
    #[error("invalid data table: {0}")]
    InvalidTable(String),

    /// A model file failed to load or had the wrong format version.
    #[error("invalid model file: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
