//! Token vocabulary with dense indices and UNK/PAD special entries.

use super::{IngestError, Sentence};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const UNK_TOKEN: &str = "<unk>";
pub const PAD_TOKEN: &str = "<pad>";

/// Token-to-index bijection built from the training split only. Lookup never
/// fails: unseen tokens map to UNK.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    pub min_frequency: usize,
}

impl Vocabulary {
    /// Builds the vocabulary: UNK and PAD first, then every training token
    /// with count ≥ `min_frequency`, ordered by (frequency desc, lexicographic)
    /// so index assignment is deterministic.
    pub fn build(training: &[Sentence], min_frequency: usize) -> Result<Self, IngestError> {
        if training.is_empty() {
            return Err(IngestError::EmptyCorpus);
        }
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for s in training {
            for t in &s.tokens {
                *counts.entry(t.surface.as_str()).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|&(tok, n)| n >= min_frequency && tok != UNK_TOKEN && tok != PAD_TOKEN)
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut tokens = vec![UNK_TOKEN.to_string(), PAD_TOKEN.to_string()];
        tokens.extend(kept.into_iter().map(|(t, _)| t.to_string()));
        Ok(Self::from_tokens(tokens, min_frequency))
    }

    fn from_tokens(tokens: Vec<String>, min_frequency: usize) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, index, min_frequency }
    }

    /// Rebuilds the lookup map after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self.tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn unk_index(&self) -> usize {
        0
    }

    pub fn pad_index(&self) -> usize {
        1
    }

    /// Index of a token; unseen tokens yield the UNK index.
    pub fn lookup(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(self.unk_index())
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode(&self, sentence: &Sentence) -> Vec<usize> {
        sentence.tokens.iter().map(|t| self.lookup(&t.surface)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(texts: &[&str]) -> Vec<Sentence> {
        texts.iter().enumerate().map(|(i, t)| Sentence::new(format!("s{i}"), t)).collect()
    }

    #[test]
    fn keeps_all_with_min_freq_one() {
        let v = Vocabulary::build(&corpus(&["a a b"]), 1).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.token(0), Some(UNK_TOKEN));
        assert_eq!(v.token(1), Some(PAD_TOKEN));
        assert_eq!(v.token(2), Some("a"));
        assert_eq!(v.token(3), Some("b"));
    }

    #[test]
    fn min_freq_two_drops_singletons() {
        let v = Vocabulary::build(&corpus(&["a a b"]), 2).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.lookup("b"), v.unk_index());
        assert_eq!(v.lookup("a"), 2);
    }

    #[test]
    fn unseen_token_maps_to_unk() {
        let v = Vocabulary::build(&corpus(&["a"]), 1).unwrap();
        assert_eq!(v.lookup("never-seen"), v.unk_index());
    }

    #[test]
    fn ordering_frequency_desc_then_lexicographic() {
        let v = Vocabulary::build(&corpus(&["b b c a a"]), 1).unwrap();
        // a and b both occur twice -> lexicographic; c once -> last
        assert_eq!(v.token(2), Some("a"));
        assert_eq!(v.token(3), Some("b"));
        assert_eq!(v.token(4), Some("c"));
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(Vocabulary::build(&[], 1), Err(IngestError::EmptyCorpus)));
    }

    #[test]
    fn encode_sentence() {
        let v = Vocabulary::build(&corpus(&["a b"]), 1).unwrap();
        let s = Sentence::new("x", "b a z");
        assert_eq!(v.encode(&s), vec![v.lookup("b"), v.lookup("a"), v.unk_index()]);
    }

    #[test]
    fn serde_roundtrip_rebuilds_index() {
        let v = Vocabulary::build(&corpus(&["a b c"]), 1).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let mut back: Vocabulary = serde_json::from_str(&json).unwrap();
        back.rebuild_index();
        assert_eq!(back.lookup("b"), v.lookup("b"));
        assert_eq!(back.len(), v.len());
    }
}
