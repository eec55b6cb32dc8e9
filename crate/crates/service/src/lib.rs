//! HTTP/JSON tutor sessions.
//!
//! Each session is one JSON document on disk, replaced atomically after
//! every state change and before the response is sent. Requests on one
//! session are serialized by a per-session lock.

mod api;
mod error;
mod store;

pub use api::{
    router, AnswerRequest, AnswerResponse, AppState, CreateSessionRequest, CreateSessionResponse, HistoryResponse,
    QuestionResponse,
};
pub use error::ApiError;
pub use store::{SessionEnvelope, SessionStore, StoreError};

use std::path::Path;

use qtutor_core::vocab::{load_or_build_synonyms, DEFAULT_SYNONYM_COUNT};
use qtutor_core::{Lexicon, VocabError};

/// Load the lexicon (bundled if no path) and, given embeddings, its synonym
/// sets through the on-disk cache in `cache_dir`.
pub fn load_content(
    lexicon: Option<&Path>,
    embeddings: Option<&Path>,
    cache_dir: &Path,
) -> Result<Lexicon, VocabError> {
    let mut lex = match lexicon {
        Some(path) => Lexicon::from_path(path)?,
        None => Lexicon::bundled(),
    };
    if let Some(path) = embeddings {
        load_or_build_synonyms(&mut lex, path, cache_dir, DEFAULT_SYNONYM_COUNT)?;
    }
    lex.require_full_coverage()?;
    Ok(lex)
}
