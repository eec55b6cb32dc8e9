//! Vocabulary content: pretrained embeddings, the CEFR-tagged lexicon,
//! nearest-neighbour synonym sets and answer checking.

mod cache;
mod embeddings;
mod lexicon;

pub use cache::{load_or_build_synonyms, synonym_cache_path};
pub use embeddings::EmbeddingIndex;
pub use lexicon::{normalize_answer, validate_answer, Lexicon, WordItem};

use std::path::PathBuf;

use crate::cefr::CefrLevel;

pub const DEFAULT_SYNONYM_COUNT: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum VocabError {
    #[error("embedding source is empty")]
    EmptySource,
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: zero vector for {word:?}")]
    ZeroVector { line: usize, word: String },
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("neighbour count must be at least 1")]
    InvalidK,
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("lexicon has no words at level {0}")]
    MissingLevel(CefrLevel),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}
