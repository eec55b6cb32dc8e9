use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use sha2::{Digest, Sha256};

use super::embeddings::EmbeddingIndex;
use super::lexicon::Lexicon;
use super::VocabError;

/// Cache location keyed by the embedding file's SHA-256 and `k`, so a new
/// embedding file never reuses stale synonyms.
pub fn synonym_cache_path(cache_dir: &Path, embeddings_bytes: &[u8], k: usize) -> PathBuf {
    let digest = Sha256::digest(embeddings_bytes);
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    cache_dir.join(format!("synonyms-{hex}-k{k}.json"))
}

/// Populate `lexicon` synonyms from cache, or build them from the embeddings
/// and write the cache (a JSON map word -> [synonyms]).
pub fn load_or_build_synonyms(
    lexicon: &mut Lexicon,
    embeddings_path: &Path,
    cache_dir: &Path,
    k: usize,
) -> Result<PathBuf, VocabError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| VocabError::Io { path, source }
    };
    let bytes = fs::read(embeddings_path).map_err(io_err(embeddings_path))?;
    let cache = synonym_cache_path(cache_dir, &bytes, k);
    if let Ok(text) = fs::read_to_string(&cache) {
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(&text).map_err(|source| VocabError::Json { path: cache.clone(), source })?;
        // a cache built for a different lexicon is rebuilt
        if lexicon.items().iter().all(|i| map.contains_key(&i.word)) {
            lexicon.apply_synonym_map(&map)?;
            return Ok(cache);
        }
    }
    let index = EmbeddingIndex::read_text(bytes.as_slice())?;
    lexicon.build_synonyms(&index, k)?;
    fs::create_dir_all(cache_dir).map_err(io_err(cache_dir))?;
    let text = serde_json::to_string_pretty(&lexicon.synonym_map()).expect("map serializes");
    fs::write(&cache, text + "\n").map_err(io_err(&cache))?;
    info!("wrote synonym cache {}", cache.display());
    Ok(cache)
}
