use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;

use super::VocabError;

const BUNDLED: &str = include_str!("../../data/embeddings.txt");

/// Word vectors loaded from word2vec text format, searched by exact cosine.
#[derive(Debug, Clone)]
pub struct EmbeddingIndex {
    dimension: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    norms: Vec<f64>,
    lookup: HashMap<String, usize>,
}

impl EmbeddingIndex {
    /// Parse word2vec text: an optional `<count> <dim>` header, then one
    /// `word v1 .. vdim` line per word. Duplicate words keep the first vector.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self, VocabError> {
        let mut dimension: Option<usize> = None;
        let mut index = EmbeddingIndex {
            dimension: 0,
            words: Vec::new(),
            vectors: Vec::new(),
            norms: Vec::new(),
            lookup: HashMap::new(),
        };
        let mut first = true;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| VocabError::Parse { line: lineno, message: e.to_string() })?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();
            if first {
                first = false;
                if rest.len() == 1 {
                    if let (Ok(_count), Ok(dim)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                        if dim == 0 {
                            return Err(VocabError::Parse { line: lineno, message: "dimension 0".into() });
                        }
                        dimension = Some(dim);
                        continue;
                    }
                }
            }
            let expected = *dimension.get_or_insert(rest.len());
            if rest.len() != expected || expected == 0 {
                return Err(VocabError::DimensionMismatch { line: lineno, expected, found: rest.len() });
            }
            let vector = rest
                .iter()
                .map(|v| match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(VocabError::Parse { line: lineno, message: format!("bad component {v:?}") }),
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(VocabError::ZeroVector { line: lineno, word: word.to_string() });
            }
            if index.lookup.contains_key(word) {
                warn!("line {lineno}: duplicate word {word:?} ignored");
                continue;
            }
            index.lookup.insert(word.to_string(), index.words.len());
            index.words.push(word.to_string());
            index.vectors.push(vector);
            index.norms.push(norm);
        }
        if index.words.is_empty() {
            return Err(VocabError::EmptySource);
        }
        index.dimension = dimension.unwrap_or(0);
        Ok(index)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| VocabError::Io { path: path.to_path_buf(), source })?;
        Self::read_text(BufReader::new(file))
    }

    /// The small fixture embedding shipped with the crate.
    pub fn bundled() -> Self {
        Self::read_text(BUNDLED.as_bytes()).expect("bundled embeddings parse")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup.contains_key(word)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.lookup.get(word).map(|&i| self.vectors[i].as_slice())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn cosine(&self, a: &str, b: &str) -> Result<f64, VocabError> {
        let ia = self.position(a)?;
        let ib = self.position(b)?;
        Ok(self.cosine_at(ia, ib))
    }

    /// Every other word ranked by descending cosine, ties by word.
    pub fn ranked(&self, word: &str) -> Result<Vec<(&str, f64)>, VocabError> {
        let q = self.position(word)?;
        let mut scored: Vec<(&str, f64)> = (0..self.words.len())
            .filter(|&i| i != q)
            .map(|i| (self.words[i].as_str(), self.cosine_at(q, i)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(scored)
    }

    /// The `k` most similar words to `word`, excluding `word` itself.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>, VocabError> {
        if k == 0 {
            return Err(VocabError::InvalidK);
        }
        let mut ranked = self.ranked(word)?;
        ranked.truncate(k);
        Ok(ranked.into_iter().map(|(w, c)| (w.to_string(), c)).collect())
    }

    fn position(&self, word: &str) -> Result<usize, VocabError> {
        self.lookup.get(word).copied().ok_or_else(|| VocabError::UnknownWord(word.to_string()))
    }

    fn cosine_at(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self.vectors[a].iter().zip(&self.vectors[b]).map(|(x, y)| x * y).sum();
        dot / (self.norms[a] * self.norms[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EmbeddingIndex, VocabError> {
        EmbeddingIndex::read_text(text.as_bytes())
    }

    #[test]
    fn header_and_rows() {
        let idx = parse("3 4\na 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0.5\n").unwrap();
        assert_eq!((idx.len(), idx.dimension()), (3, 4));
        assert_eq!(idx.vector("c").unwrap(), &[0.0, 0.0, 1.0, 0.5]);
    }

    #[test]
    fn headerless() {
        let idx = parse("a 1 2\nb 3 4\n").unwrap();
        assert_eq!((idx.len(), idx.dimension()), (2, 2));
    }

    #[test]
    fn arity_error_names_line() {
        match parse("3 4\na 1 0 0 0\nb 0 1 0\n") {
            Err(VocabError::DimensionMismatch { line: 3, expected: 4, found: 3 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_keep_first() {
        let idx = parse("a 1 0\nb 0 1\na 5 5\n").unwrap();
        assert_eq!(idx.len(), 2);
        assert_eq!(idx.vector("a").unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn empty_and_zero_vectors() {
        assert!(matches!(parse(""), Err(VocabError::EmptySource)));
        assert!(matches!(parse("\n\n"), Err(VocabError::EmptySource)));
        assert!(matches!(parse("2 2\n"), Err(VocabError::EmptySource)));
        assert!(matches!(parse("a 0 0\n"), Err(VocabError::ZeroVector { line: 1, .. })));
        assert!(matches!(parse("a 1 x\n"), Err(VocabError::Parse { line: 1, .. })));
    }

    #[test]
    fn identical_vector_ranks_first() {
        let idx = parse("q 1 2 3\nx 0 1 0\ntwin 1 2 3\n").unwrap();
        let nn = idx.nearest_neighbors("q", 2).unwrap();
        assert_eq!(nn[0].0, "twin");
        assert!((nn[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_vectors_sort_by_word() {
        let idx = parse("q 1 0 0 0\nzeta 0 1 0 0\nalpha 0 0 1 0\nmid 0 0 0 1\n").unwrap();
        let nn = idx.nearest_neighbors("q", 3).unwrap();
        let words: Vec<&str> = nn.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["alpha", "mid", "zeta"]);
        assert!(nn.iter().all(|(_, c)| *c == 0.0));
    }

    #[test]
    fn hand_built_ranking() {
        // cosines against q=(1,0,0): e=1, a=b=1/sqrt2, c=0, d=-1
        let idx = parse("q 1 0 0\na 1 1 0\nb 1 0 1\nc 0 1 0\nd -1 0 0\ne 2 0 0\n").unwrap();
        let nn = idx.nearest_neighbors("q", 5).unwrap();
        let words: Vec<&str> = nn.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["e", "a", "b", "c", "d"]);
        let expected = [1.0, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0, -1.0];
        for ((_, got), want) in nn.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(idx.nearest_neighbors("nope", 1), Err(VocabError::UnknownWord(_))));
        assert!(matches!(idx.nearest_neighbors("q", 0), Err(VocabError::InvalidK)));
    }

    #[test]
    fn self_cosine_is_one() {
        let idx = EmbeddingIndex::bundled();
        for w in idx.words() {
            assert!((idx.cosine(w, w).unwrap() - 1.0).abs() < 1e-12);
            let nn = idx.nearest_neighbors(w, 10).unwrap();
            assert!(nn.iter().all(|(n, _)| n != w));
            assert!(nn.windows(2).all(|p| p[0].1 > p[1].1 || (p[0].1 == p[1].1 && p[0].0 < p[1].0)));
        }
    }
}
