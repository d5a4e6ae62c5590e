//! Subtitle alignment: parses SubRip files and assigns time spans to
//! transcribed sentences by fuzzy-matching their text against subtitle
//! chunks (and short concatenations of consecutive chunks).

mod fuzzy;
mod srt;

pub use fuzzy::{levenshtein, normalize, similarity};
pub use srt::{emit_srt, parse_srt, parse_srt_str, SrtError};

use crate::ingest::Sentence;
use serde::{Deserialize, Serialize};

/// One SubRip subtitle block: counter, time interval, and its text lines
/// joined by single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleChunk {
    pub counter: u64,
    pub start_ms: u64,
    pub end_ms: u64,
    pub text: String,
}

/// Outcome of aligning one sentence against the subtitle file. Sentences
/// that matched nothing keep their best score but carry no span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub sentence_id: String,
    pub matched_chunk_counters: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_ms: Option<u64>,
    pub best_similarity: f64,
}

impl AlignmentResult {
    pub fn matched(&self) -> bool {
        self.start_ms.is_some()
    }
}

/// Aligns each sentence against every window of up to `window` consecutive
/// chunks (text concatenated with single spaces). Windows scoring above
/// `threshold`, or matching exactly after normalization, are accepted; the
/// best-scoring window (ties: smallest, then earliest) defines the span as
/// [min start, max end] of its chunks.
///
/// Results come back in input sentence order; the mapping may be
/// many-to-many (one chunk may serve several sentences).
pub fn align(
    sentences: &[Sentence],
    chunks: &[SubtitleChunk],
    threshold: f64,
    window: usize,
) -> Vec<AlignmentResult> {
    let window = window.max(1);
    let norm_chunks: Vec<String> = chunks.iter().map(|c| normalize(&c.text)).collect();

    sentences
        .iter()
        .map(|sentence| {
            let text = normalize(&sentence.text());
            let mut best: Option<(f64, usize, usize)> = None; // (score, start, len)
            for start in 0..chunks.len() {
                let mut concat = String::new();
                for len in 1..=window.min(chunks.len() - start) {
                    if len > 1 {
                        concat.push(' ');
                    }
                    concat.push_str(&norm_chunks[start + len - 1]);
                    let score = fuzzy::similarity_normalized(&text, &concat);
                    let better = match best {
                        None => true,
                        Some((s, bs, bl)) => {
                            score > s || (score == s && (len < bl || (len == bl && start < bs)))
                        }
                    };
                    if better {
                        best = Some((score, start, len));
                    }
                }
            }
            match best {
                Some((score, start, len)) if score > threshold || exact(&text, &norm_chunks, start, len) => {
                    let matched = &chunks[start..start + len];
                    AlignmentResult {
                        sentence_id: sentence.id.clone(),
                        matched_chunk_counters: matched.iter().map(|c| c.counter).collect(),
                        start_ms: matched.iter().map(|c| c.start_ms).min(),
                        end_ms: matched.iter().map(|c| c.end_ms).max(),
                        best_similarity: score,
                    }
                }
                Some((score, _, _)) => AlignmentResult {
                    sentence_id: sentence.id.clone(),
                    matched_chunk_counters: Vec::new(),
                    start_ms: None,
                    end_ms: None,
                    best_similarity: score,
                },
                None => AlignmentResult {
                    sentence_id: sentence.id.clone(),
                    matched_chunk_counters: Vec::new(),
                    start_ms: None,
                    end_ms: None,
                    best_similarity: 0.0,
                },
            }
        })
        .collect()
}

fn exact(text: &str, norm_chunks: &[String], start: usize, len: usize) -> bool {
    let concat = norm_chunks[start..start + len].join(" ");
    !text.is_empty() && text == concat
}

/// Copies the spans of matched alignment results onto the sentences (by id),
/// producing the augmented dataset consumed by feature extraction.
pub fn apply_alignments(sentences: &[Sentence], results: &[AlignmentResult]) -> Vec<Sentence> {
    sentences
        .iter()
        .map(|s| {
            let mut out = s.clone();
            if let Some(r) = results.iter().find(|r| r.sentence_id == s.id) {
                if let (Some(start), Some(end)) = (r.start_ms, r.end_ms) {
                    out.time_span = Some((start, end));
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chunk(counter: u64, start_ms: u64, end_ms: u64, text: &str) -> SubtitleChunk {
        SubtitleChunk { counter, start_ms, end_ms, text: text.to_string() }
    }

    fn sent(id: &str, text: &str) -> Sentence {
        Sentence::new(id, text)
    }

    #[test]
    fn exact_text_takes_chunk_span() {
        let chunks = vec![chunk(1, 1000, 2000, "hello there"), chunk(2, 2500, 3000, "bye")];
        let res = align(&[sent("s1", "hello there")], &chunks, 0.9, 4);
        assert_eq!(res[0].matched_chunk_counters, vec![1]);
        assert_eq!(res[0].start_ms, Some(1000));
        assert_eq!(res[0].end_ms, Some(2000));
        assert_eq!(res[0].best_similarity, 1.0);
    }

    #[test]
    fn split_sentence_spans_both_chunks() {
        let chunks = vec![
            chunk(1, 1000, 2000, "the camera is"),
            chunk(2, 2500, 3000, "really great"),
        ];
        let res = align(&[sent("s1", "the camera is really great")], &chunks, 0.9, 4);
        assert_eq!(res[0].matched_chunk_counters, vec![1, 2]);
        assert_eq!(res[0].start_ms, Some(1000));
        assert_eq!(res[0].end_ms, Some(3000));
    }

    #[test]
    fn below_threshold_reports_best_similarity() {
        let chunks = vec![chunk(1, 0, 1000, "completely different words here")];
        let res = align(&[sent("s1", "zq xv")], &chunks, 0.9, 4);
        assert!(!res[0].matched());
        assert!(res[0].matched_chunk_counters.is_empty());
        assert!(res[0].best_similarity < 0.9);
    }

    #[test]
    fn fuzzy_match_above_threshold() {
        // one substitution in 20+ chars stays above 0.9
        let chunks = vec![chunk(7, 100, 900, "the quick brown fox jumps")];
        let res = align(&[sent("s1", "the quick brown fox jumps")], &chunks, 0.9, 1);
        assert_eq!(res[0].matched_chunk_counters, vec![7]);
        let res = align(&[sent("s2", "the quick brown fox bumps")], &chunks, 0.9, 1);
        assert!(res[0].matched(), "similarity {}", res[0].best_similarity);
    }

    #[test]
    fn window_prefers_smaller_on_tie() {
        // identical consecutive chunks: a 1-chunk window already scores 1.0
        let chunks = vec![chunk(1, 0, 10, "same text"), chunk(2, 20, 30, "same text")];
        let res = align(&[sent("s1", "same text")], &chunks, 0.9, 4);
        assert_eq!(res[0].matched_chunk_counters, vec![1]);
    }

    #[test]
    fn order_invariant_over_sentences() {
        let chunks = vec![chunk(1, 0, 10, "alpha beta"), chunk(2, 20, 30, "gamma delta")];
        let a = align(&[sent("x", "alpha beta"), sent("y", "gamma delta")], &chunks, 0.9, 2);
        let b = align(&[sent("y", "gamma delta"), sent("x", "alpha beta")], &chunks, 0.9, 2);
        let find = |rs: &[AlignmentResult], id: &str| {
            rs.iter().find(|r| r.sentence_id == id).cloned().unwrap()
        };
        assert_eq!(find(&a, "x"), find(&b, "x"));
        assert_eq!(find(&a, "y"), find(&b, "y"));
    }

    #[test]
    fn empty_inputs() {
        assert!(align(&[], &[chunk(1, 0, 1, "x")], 0.9, 4).is_empty());
        let res = align(&[sent("s1", "text")], &[], 0.9, 4);
        assert!(!res[0].matched());
        assert_eq!(res[0].best_similarity, 0.0);
    }

    #[test]
    fn span_within_file_bounds() {
        let chunks = vec![
            chunk(1, 500, 900, "one two three"),
            chunk(2, 1000, 1500, "four five six"),
            chunk(3, 2000, 2400, "seven eight"),
        ];
        let res = align(
            &[sent("a", "one two three"), sent("b", "four five six seven eight")],
            &chunks,
            0.9,
            4,
        );
        for r in &res {
            if let (Some(s), Some(e)) = (r.start_ms, r.end_ms) {
                assert!(s < e);
                assert!(s >= 500 && e <= 2400);
            }
        }
    }

    #[test]
    fn apply_alignments_fills_spans() {
        let sentences = vec![sent("s1", "hello"), sent("s2", "missing")];
        let results = vec![
            AlignmentResult {
                sentence_id: "s1".into(),
                matched_chunk_counters: vec![3],
                start_ms: Some(100),
                end_ms: Some(200),
                best_similarity: 1.0,
            },
            AlignmentResult {
                sentence_id: "s2".into(),
                matched_chunk_counters: vec![],
                start_ms: None,
                end_ms: None,
                best_similarity: 0.4,
            },
        ];
        let out = apply_alignments(&sentences, &results);
        assert_eq!(out[0].time_span, Some((100, 200)));
        assert_eq!(out[1].time_span, None);
    }
}
