use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by corpus construction, spectral routines, training and
/// evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("corpus contains no tokens")]
    EmptyCorpus,

    #[error("document {index} has no nonzero term weight")]
    EmptyDocument { index: usize },

    #[error("both classes must be present (positive: {n_pos}, negative: {n_neg})")]
    SingleClass { n_pos: usize, n_neg: usize },

    #[error("duplicate vocabulary word {0:?}")]
    DuplicateWord(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("epsilon {0} is outside [0, 1]")]
    InvalidEpsilon(f64),

    #[error("dimension {k} is outside 1..={max}")]
    InvalidDimension { k: usize, max: usize },

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("column {index} has zero norm")]
    ZeroColumn { index: usize },

    #[error("vector for word {word:?} is zero before normalization")]
    ZeroWordVector { word: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("word {query:?} is not in the vocabulary (closest: {})", suggestions.join(", "))]
    OutOfVocabulary {
        query: String,
        suggestions: Vec<String>,
    },

    #[error("split {split}: {source}")]
    Split { split: usize, source: Box<Error> },
}

pub type Result<T> = core::result::Result<T, Error>;
