//! JSONL dataset format: one sentence object per line. This is the canonical
//! form; `read_jsonl ∘ write_jsonl` is the identity.

use super::{IngestError, Sentence};
use crate::labels::{SentimentClass, TagSequence};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sentiment: Option<SentimentClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    media_ref: Option<String>,
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Sentence>, IngestError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let reader = BufReader::new(file);

    let mut sentences = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|source| IngestError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            path: display.clone(),
            line: line_no,
            detail: e.to_string(),
        })?;
        let mut s = Sentence::from_tokens(record.id.clone(), &record.tokens);
        if let Some(tags) = record.tags {
            let gold = TagSequence::from_label_strings(&tags)
                .map_err(|source| IngestError::Label { id: record.id.clone(), source })?;
            s.gold = Some(gold);
        }
        s.sentence_sentiment = record.sentiment;
        s.time_span = match (record.start_ms, record.end_ms) {
            (Some(start), Some(end)) => Some((start, end)),
            (None, None) => None,
            _ => {
                return Err(IngestError::Validation {
                    id: record.id,
                    detail: "start_ms and end_ms must both be present or both absent".to_string(),
                })
            }
        };
        s.media_ref = record.media_ref;
        sentences.push(s);
    }
    Ok(sentences)
}

pub fn write_jsonl(path: &Path, sentences: &[Sentence]) -> Result<(), IngestError> {
    let display = path.display().to_string();
    let file =
        File::create(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let mut w = BufWriter::new(file);
    for s in sentences {
        let record = Record {
            id: s.id.clone(),
            tokens: s.tokens.iter().map(|t| t.surface.clone()).collect(),
            tags: s.gold.as_ref().map(|g| g.label_strings()),
            sentiment: s.sentence_sentiment,
            start_ms: s.time_span.map(|(a, _)| a),
            end_ms: s.time_span.map(|(_, b)| b),
            media_ref: s.media_ref.clone(),
        };
        let json = serde_json::to_string(&record).map_err(|e| IngestError::Parse {
            path: display.clone(),
            line: 0,
            detail: e.to_string(),
        })?;
        writeln!(w, "{json}").map_err(|source| IngestError::Io { path: display.clone(), source })?;
    }
    w.flush().map_err(|source| IngestError::Io { path: display, source })
}
