use std::collections::BTreeMap;

use qtutor_core::vocab::load_or_build_synonyms;
use qtutor_core::{EmbeddingIndex, Lexicon};

fn oracle() -> BTreeMap<String, Vec<String>> {
    serde_json::from_str(include_str!("fixtures/synonyms_oracle.json")).unwrap()
}

#[test]
fn bundled_synonyms_match_bruteforce_oracle() {
    let mut lexicon = Lexicon::bundled();
    lexicon.build_synonyms(&EmbeddingIndex::bundled(), 10).unwrap();
    assert_eq!(lexicon.synonym_map(), oracle());
}

#[test]
fn neighbors_never_include_the_word_itself() {
    let index = EmbeddingIndex::bundled();
    for word in index.words() {
        let n = index.nearest_neighbors(word, 10).unwrap();
        assert_eq!(n.len(), 10);
        assert!(n.iter().all(|(w, _)| w != word));
        assert!(n.windows(2).all(|p| p[0].1 >= p[1].1));
    }
}

#[test]
fn cache_round_trip_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let emb = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/embeddings.txt");
    let mut first = Lexicon::bundled();
    load_or_build_synonyms(&mut first, &emb, dir.path(), 10).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let mut second = Lexicon::bundled();
    load_or_build_synonyms(&mut second, &emb, dir.path(), 10).unwrap();
    assert_eq!(first.synonym_map(), oracle());
    assert_eq!(second.synonym_map(), oracle());
}
