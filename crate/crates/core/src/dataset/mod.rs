//! Loading of feature tables and description corpora, tokenization,
//! concept vocabulary construction and object-level fold splitting.

mod corpus;
mod features;
mod folds;
mod vocab;

use thiserror::Error;

pub use corpus::{
    builtin_stopwords, load_descriptions, load_stopwords, parse_stopwords, tokenize, Description, DescriptionCorpus,
    Language,
};
pub use features::{load_category_manifest, load_features, write_features, CategorySlices, FeatureTable, Instance};
pub use folds::{split_folds, FoldAssignment};
pub use vocab::{
    build_vocabulary, load_concept_categories, parse_concept_categories, Concept, ConceptCategoryMap, ConceptVocabulary,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: u64, reason: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: expected {expected} features, found {found}")]
    DimensionMismatch { line: u64, expected: usize, found: usize },
    #[error("duplicate instance id `{0}`")]
    DuplicateInstanceId(String),
    #[error("line {line}: malformed line: {reason}")]
    MalformedLine { line: u64, reason: String },
    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: u64 },
    #[error("invalid category manifest: {0}")]
    InvalidManifest(String),
    #[error("cannot split {objects} objects into {k} folds")]
    TooFewObjects { objects: usize, k: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl DatasetError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, DatasetError>;

/// Splits `bytes` into lines, reporting the first invalid UTF-8 position as a line number.
pub(crate) fn utf8_lines(bytes: &[u8]) -> Result<Vec<&str>> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
        DatasetError::InvalidUtf8 { line }
    })?;
    Ok(text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect())
}
