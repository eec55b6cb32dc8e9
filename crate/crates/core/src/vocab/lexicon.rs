use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::embeddings::EmbeddingIndex;
use super::VocabError;
use crate::cefr::CefrLevel;

const BUNDLED: &str = include_str!("../../data/lexicon.json");

/// A vocabulary item the student has to name from its image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordItem {
    pub word: String,
    pub level: CefrLevel,
    /// Opaque reference to the image shown in place of the word.
    pub image_ref: String,
    /// Accepted alternatives, in neighbour-rank order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub synonyms: Vec<String>,
}

/// Lower-case the response after trimming surrounding whitespace.
pub fn normalize_answer(response: &str) -> String {
    response.trim().to_lowercase()
}

/// True if the response names the target word or one of its synonyms.
pub fn validate_answer(response: &str, item: &WordItem) -> bool {
    let answer = normalize_answer(response);
    answer == item.word || item.synonyms.contains(&answer)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    items: Vec<WordItem>,
    by_word: HashMap<String, usize>,
}

impl Lexicon {
    pub fn new(items: Vec<WordItem>) -> Result<Self, VocabError> {
        let mut by_word = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if item.word.is_empty() || item.word != normalize_answer(&item.word) {
                return Err(VocabError::Lexicon(format!("word {:?} must be trimmed lowercase", item.word)));
            }
            if by_word.insert(item.word.clone(), i).is_some() {
                return Err(VocabError::Lexicon(format!("duplicate word {:?}", item.word)));
            }
            check_synonyms(item)?;
        }
        Ok(Self { items, by_word })
    }

    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        let items: Vec<WordItem> = serde_json::from_str(text)?;
        Self::new(items).map_err(serde::de::Error::custom)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| VocabError::Io { path: path.into(), source })?;
        Self::from_json_str(&text).map_err(|source| VocabError::Json { path: path.into(), source })
    }

    /// The 36-word fixture lexicon shipped with the crate (six words per level).
    pub fn bundled() -> Self {
        Self::from_json_str(BUNDLED).expect("bundled lexicon parses")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.items).expect("lexicon serializes")
    }

    pub fn items(&self) -> &[WordItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&WordItem> {
        self.by_word.get(word).map(|&i| &self.items[i])
    }

    /// Words at `level` in file order.
    pub fn words_at(&self, level: CefrLevel) -> impl Iterator<Item = &WordItem> {
        self.items.iter().filter(move |w| w.level == level)
    }

    /// The tutor needs at least one word at every level.
    pub fn require_full_coverage(&self) -> Result<(), VocabError> {
        for level in CefrLevel::ALL {
            if self.words_at(level).next().is_none() {
                return Err(VocabError::MissingLevel(level));
            }
        }
        Ok(())
    }

    /// Fill every item's synonyms with its `k` nearest embedding neighbours.
    /// Words missing from the index get an empty set and a warning.
    pub fn build_synonyms(&mut self, index: &EmbeddingIndex, k: usize) -> Result<(), VocabError> {
        if k == 0 {
            return Err(VocabError::InvalidK);
        }
        for item in &mut self.items {
            item.synonyms = if index.contains(&item.word) {
                let mut out: Vec<String> = Vec::with_capacity(k);
                for (neighbour, _) in index.ranked(&item.word)? {
                    let n = neighbour.to_lowercase();
                    if n != item.word && !out.contains(&n) {
                        out.push(n);
                        if out.len() == k {
                            break;
                        }
                    }
                }
                out
            } else {
                warn!("{:?} is not in the embedding index; no synonyms", item.word);
                Vec::new()
            };
        }
        Ok(())
    }

    pub fn synonym_map(&self) -> BTreeMap<String, Vec<String>> {
        self.items.iter().map(|i| (i.word.clone(), i.synonyms.clone())).collect()
    }

    pub fn apply_synonym_map(&mut self, map: &BTreeMap<String, Vec<String>>) -> Result<(), VocabError> {
        for item in &mut self.items {
            item.synonyms = map.get(&item.word).cloned().unwrap_or_default();
            check_synonyms(item)?;
        }
        Ok(())
    }
}

fn check_synonyms(item: &WordItem) -> Result<(), VocabError> {
    if item.synonyms.len() > 10 {
        return Err(VocabError::Lexicon(format!("{:?} has more than 10 synonyms", item.word)));
    }
    for (i, s) in item.synonyms.iter().enumerate() {
        if *s == item.word || *s != s.to_lowercase() || item.synonyms[..i].contains(s) {
            return Err(VocabError::Lexicon(format!("bad synonym {s:?} for {:?}", item.word)));
        }
    }
    Ok(())
}
