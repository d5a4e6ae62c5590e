//! Dataset ingestion: tokenization, vocabularies, pre-trained embeddings,
//! CoNLL/JSONL parsing, span-overlap polarity assignment, and the
//! single-sentiment filter used by the sentence-level settings.

mod conll;
mod embed;
mod jsonl;
mod tokenize;
mod vocab;

pub use conll::{read_conll, read_predictions, write_conll, write_predictions};
pub use embed::{load_embeddings, CoverageReport, EmbeddingTable};
pub use jsonl::{read_jsonl, write_jsonl};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, PAD_TOKEN, UNK_TOKEN};

use crate::labels::{CollapsedTag, LabelError, SentimentClass, TagSequence};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Default maximum sentence length; longer sentences are trimmed.
pub const DEFAULT_MAX_LENGTH: usize = 300;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Parse { path: String, line: usize, detail: String },
    #[error("sentence `{id}`: {detail}")]
    Validation { id: String, detail: String },
    #[error("sentence `{id}`: {source}")]
    Label {
        id: String,
        #[source]
        source: LabelError,
    },
    #[error("embedding file {path}:{line}: dimension {got} differs from first line ({expected})")]
    EmbeddingDim { path: String, line: usize, expected: usize, got: usize },
    #[error("empty corpus: vocabulary needs at least one training sentence")]
    EmptyCorpus,
}

/// One surface token with its position and character span in the sentence
/// text. For pre-tokenized input the offsets refer to the tokens joined by
/// single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub index: usize,
    pub start_char: usize,
    pub end_char: usize,
}

/// A sentence with optional gold tags, sentence-level sentiment, and a link
/// back to its source media.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
    pub gold: Option<TagSequence>,
    pub sentence_sentiment: Option<SentimentClass>,
    /// Milliseconds into the source media: (start, end), start < end.
    pub time_span: Option<(u64, u64)>,
    pub media_ref: Option<String>,
}

impl Sentence {
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        Sentence {
            id: id.into(),
            tokens: tokenize(text),
            gold: None,
            sentence_sentiment: None,
            time_span: None,
            media_ref: None,
        }
    }

    /// Builds a sentence from already-tokenized surfaces; offsets are
    /// assigned as if the tokens were joined by single spaces.
    pub fn from_tokens(id: impl Into<String>, surfaces: &[String]) -> Self {
        let mut tokens = Vec::with_capacity(surfaces.len());
        let mut offset = 0usize;
        for (index, surface) in surfaces.iter().enumerate() {
            let start = offset;
            let end = start + surface.chars().count();
            tokens.push(Token { surface: surface.clone(), index, start_char: start, end_char: end });
            offset = end + 1;
        }
        Sentence {
            id: id.into(),
            tokens,
            gold: None,
            sentence_sentiment: None,
            time_span: None,
            media_ref: None,
        }
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    pub fn text(&self) -> String {
        self.surfaces().join(" ")
    }

    /// Keeps the first `max_length` tokens, dropping the rest of both the
    /// tokens and the gold tags so alignment is preserved. A prefix of a
    /// valid IOB sequence is still valid.
    pub fn trim(&mut self, max_length: usize) {
        if self.tokens.len() <= max_length {
            return;
        }
        self.tokens.truncate(max_length);
        if let Some(gold) = &mut self.gold {
            match gold {
                TagSequence::Ae(t) => t.truncate(max_length),
                TagSequence::Sc(t) => t.truncate(max_length),
                TagSequence::Collapsed(t) => t.truncate(max_length),
            }
        }
    }

    /// Strict-mode checks applied when loading gold data: tag/token length
    /// agreement, IOB well-formedness, and time-span ordering.
    pub fn validate(&self) -> Result<(), IngestError> {
        if let Some(gold) = &self.gold {
            if gold.len() != self.tokens.len() {
                return Err(IngestError::Validation {
                    id: self.id.clone(),
                    detail: format!(
                        "{} tokens but {} tags",
                        self.tokens.len(),
                        gold.len()
                    ),
                });
            }
            gold.validate_strict()
                .map_err(|source| IngestError::Label { id: self.id.clone(), source })?;
        }
        if let Some((start, end)) = self.time_span {
            if start >= end {
                return Err(IngestError::Validation {
                    id: self.id.clone(),
                    detail: format!("time span start {start} is not before end {end}"),
                });
            }
        }
        Ok(())
    }
}

/// Character-offset annotation over raw sentence text, as found in
/// span-annotated corpora: either an opinion target or a polarity region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanAnnotation {
    pub start_char: usize,
    pub end_char: usize,
    pub kind: SpanKind,
    pub polarity_value: Option<SentimentClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    Target,
    Polarity,
}

impl SpanAnnotation {
    pub fn target(start_char: usize, end_char: usize) -> Self {
        debug_assert!(start_char < end_char);
        SpanAnnotation { start_char, end_char, kind: SpanKind::Target, polarity_value: None }
    }

    pub fn polarity(start_char: usize, end_char: usize, value: SentimentClass) -> Self {
        debug_assert!(start_char < end_char);
        SpanAnnotation { start_char, end_char, kind: SpanKind::Polarity, polarity_value: Some(value) }
    }

    fn overlap_len(&self, other: &SpanAnnotation) -> usize {
        let lo = self.start_char.max(other.start_char);
        let hi = self.end_char.min(other.end_char);
        hi.saturating_sub(lo)
    }
}

/// Assigns each target span a sentiment from overlapping polarity spans.
///
/// A target overlapping at least one character of a polarity span takes that
/// span's polarity; with multiple overlaps the largest overlap wins, ties
/// going to the polarity span that starts earliest. Targets overlapping
/// nothing are neutral.
pub fn assign_polarity_by_overlap(
    targets: &[SpanAnnotation],
    polarities: &[SpanAnnotation],
) -> Vec<SentimentClass> {
    targets
        .iter()
        .map(|target| {
            polarities
                .iter()
                .filter(|p| p.kind == SpanKind::Polarity && target.overlap_len(p) > 0)
                .max_by(|a, b| {
                    target
                        .overlap_len(a)
                        .cmp(&target.overlap_len(b))
                        // max_by keeps the later element on ties, so order
                        // earliest-span-last to make the earliest span win
                        .then(b.start_char.cmp(&a.start_char))
                        .then(b.end_char.cmp(&a.end_char))
                })
                .and_then(|p| p.polarity_value)
                .unwrap_or(SentimentClass::Neutral)
        })
        .collect()
}

/// Keeps only sentences whose aspects all share one sentiment, or that have
/// no aspect at all. Kept sentences without an explicit sentence sentiment
/// get the shared aspect sentiment, or neutral when aspect-free.
pub fn filter_single_sentiment(sentences: &[Sentence]) -> Vec<Sentence> {
    sentences
        .iter()
        .filter_map(|s| {
            // all-O gold parses as AE; as_collapsed recovers those sentences
            let Some(TagSequence::Collapsed(tags)) = s.gold.as_ref().and_then(|g| g.as_collapsed())
            else {
                return None;
            };
            let mut distinct: Vec<SentimentClass> = Vec::new();
            for tag in &tags {
                if let CollapsedTag::Begin(c) | CollapsedTag::Inside(c) = tag {
                    if !distinct.contains(c) {
                        distinct.push(*c);
                    }
                }
            }
            match distinct.len() {
                0 => {
                    let mut kept = s.clone();
                    kept.sentence_sentiment =
                        Some(kept.sentence_sentiment.unwrap_or(SentimentClass::Neutral));
                    Some(kept)
                }
                1 => {
                    let mut kept = s.clone();
                    kept.sentence_sentiment = Some(kept.sentence_sentiment.unwrap_or(distinct[0]));
                    Some(kept)
                }
                _ => None,
            }
        })
        .collect()
}

/// On-disk dataset format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Conll,
    Jsonl,
}

impl std::str::FromStr for DatasetFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conll" => Ok(DatasetFormat::Conll),
            "jsonl" => Ok(DatasetFormat::Jsonl),
            other => Err(format!("unknown dataset format `{other}` (expected conll or jsonl)")),
        }
    }
}

/// Loads a dataset and validates every sentence in strict mode.
pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Vec<Sentence>, IngestError> {
    let sentences = match format {
        DatasetFormat::Conll => read_conll(path)?,
        DatasetFormat::Jsonl => read_jsonl(path)?,
    };
    for s in &sentences {
        s.validate()?;
    }
    Ok(sentences)
}

/// Writes a dataset in the requested format.
pub fn save_dataset(
    path: &Path,
    format: DatasetFormat,
    sentences: &[Sentence],
) -> Result<(), IngestError> {
    match format {
        DatasetFormat::Conll => write_conll(path, sentences),
        DatasetFormat::Jsonl => write_jsonl(path, sentences),
    }
}
