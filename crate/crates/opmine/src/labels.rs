//! Tagging schemes for fine-grained opinion mining.
//!
//! Three per-token annotation schemes are supported:
//!
//! - **AE** — plain IOB aspect-membership tags `O`, `B`, `I`.
//! - **SC** — per-token sentiment tags: no sentiment, positive, negative (or neutral).
//! - **Collapsed** — aspect membership and polarity fused into a single tag
//!   (`O`, `B-POS`, `I-NEG`, ...).
//!
//! The module provides conversions between the schemes ([`collapse`] /
//! [`decouple`]), strict and lenient validation, chunk extraction with
//! conlleval boundary conventions ([`extract_chunks`]), and the label
//! vocabulary used by sequence models ([`TagVocab`]).
//!
//! All types are immutable values and all functions are pure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentiment polarity of an aspect or sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentClass {
    Positive,
    Negative,
    Neutral,
}

/// Canonical ordering used everywhere a deterministic sentiment order is needed.
pub const CANONICAL_SENTIMENTS: [SentimentClass; 3] = [
    SentimentClass::Positive,
    SentimentClass::Negative,
    SentimentClass::Neutral,
];

impl SentimentClass {
    /// Suffix used in collapsed label strings (`B-POS`, `I-NEG`, `B-NEU`).
    pub fn tag_suffix(self) -> &'static str {
        match self {
            SentimentClass::Positive => "POS",
            SentimentClass::Negative => "NEG",
            SentimentClass::Neutral => "NEU",
        }
    }

    pub fn from_tag_suffix(s: &str) -> Option<Self> {
        match s {
            "POS" => Some(SentimentClass::Positive),
            "NEG" => Some(SentimentClass::Negative),
            "NEU" => Some(SentimentClass::Neutral),
            _ => None,
        }
    }

    /// Lowercase name, matching the JSONL serialization.
    pub fn name(self) -> &'static str {
        match self {
            SentimentClass::Positive => "positive",
            SentimentClass::Negative => "negative",
            SentimentClass::Neutral => "neutral",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "positive" => Some(SentimentClass::Positive),
            "negative" => Some(SentimentClass::Negative),
            "neutral" => Some(SentimentClass::Neutral),
            _ => None,
        }
    }
}

impl std::fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Plain IOB aspect-membership tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AeTag {
    Outside,
    Begin,
    Inside,
}

impl AeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AeTag::Outside => "O",
            AeTag::Begin => "B",
            AeTag::Inside => "I",
        }
    }

    pub fn from_str_tag(s: &str) -> Option<Self> {
        match s {
            "O" => Some(AeTag::Outside),
            "B" => Some(AeTag::Begin),
            "I" => Some(AeTag::Inside),
            _ => None,
        }
    }
}

/// Collapsed tag: aspect membership and sentiment in one symbol.
///
/// The type makes the scheme invariant unrepresentable: `O` carries no
/// sentiment, `B`/`I` always do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollapsedTag {
    Outside,
    Begin(SentimentClass),
    Inside(SentimentClass),
}

impl CollapsedTag {
    pub fn position(self) -> AeTag {
        match self {
            CollapsedTag::Outside => AeTag::Outside,
            CollapsedTag::Begin(_) => AeTag::Begin,
            CollapsedTag::Inside(_) => AeTag::Inside,
        }
    }

    pub fn sentiment(self) -> Option<SentimentClass> {
        match self {
            CollapsedTag::Outside => None,
            CollapsedTag::Begin(s) | CollapsedTag::Inside(s) => Some(s),
        }
    }

    pub fn label_string(self) -> String {
        match self {
            CollapsedTag::Outside => "O".to_string(),
            CollapsedTag::Begin(s) => format!("B-{}", s.tag_suffix()),
            CollapsedTag::Inside(s) => format!("I-{}", s.tag_suffix()),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "O" {
            return Some(CollapsedTag::Outside);
        }
        let (pos, suffix) = s.split_once('-')?;
        let sentiment = SentimentClass::from_tag_suffix(suffix)?;
        match pos {
            "B" => Some(CollapsedTag::Begin(sentiment)),
            "I" => Some(CollapsedTag::Inside(sentiment)),
            _ => None,
        }
    }
}

/// Which tagging scheme a [`TagSequence`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ae,
    Sc,
    Collapsed,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Ae => f.write_str("AE"),
            Scheme::Sc => f.write_str("SC"),
            Scheme::Collapsed => f.write_str("collapsed"),
        }
    }
}

/// A per-token label sequence under one of the three schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TagSequence {
    Ae(Vec<AeTag>),
    /// Per-token sentiment; `None` is the no-sentiment tag.
    Sc(Vec<Option<SentimentClass>>),
    Collapsed(Vec<CollapsedTag>),
}

/// Errors raised by label validation and conversion.
#[derive(Debug, Error)]
pub enum LabelError {
    #[error("tag sequences have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("membership/sentiment disagreement at index {index}: {detail}")]
    MembershipMismatch { index: usize, detail: String },
    #[error("strict IOB violation at index {index}: I tag follows {prev}")]
    StrictIobViolation { index: usize, prev: String },
    #[error("operation requires scheme {expected}, got {got}")]
    SchemeMismatch { expected: &'static str, got: Scheme },
    #[error("collapsed tag set requires a non-empty sentiment set")]
    EmptySentimentSet,
    #[error("unknown label string `{0}`")]
    UnknownLabel(String),
    #[error("label index {index} out of range for tag set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
}

impl TagSequence {
    pub fn scheme(&self) -> Scheme {
        match self {
            TagSequence::Ae(_) => Scheme::Ae,
            TagSequence::Sc(_) => Scheme::Sc,
            TagSequence::Collapsed(_) => Scheme::Collapsed,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TagSequence::Ae(t) => t.len(),
            TagSequence::Sc(t) => t.len(),
            TagSequence::Collapsed(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-token position (O/B/I) view; SC sequences have no positions.
    fn positions(&self) -> Option<Vec<AeTag>> {
        match self {
            TagSequence::Ae(t) => Some(t.clone()),
            TagSequence::Collapsed(t) => Some(t.iter().map(|c| c.position()).collect()),
            TagSequence::Sc(_) => None,
        }
    }

    /// Strict validation: rejects any `I` (or `I±`) that follows `O` or
    /// start-of-sequence. Used when loading gold data so annotation errors
    /// surface instead of being silently repaired.
    pub fn validate_strict(&self) -> Result<(), LabelError> {
        let Some(positions) = self.positions() else {
            return Ok(());
        };
        let mut prev = AeTag::Outside;
        for (i, pos) in positions.iter().enumerate() {
            if *pos == AeTag::Inside && prev == AeTag::Outside {
                return Err(LabelError::StrictIobViolation {
                    index: i,
                    prev: if i == 0 { "start-of-sequence".to_string() } else { "O".to_string() },
                });
            }
            prev = *pos;
        }
        Ok(())
    }

    /// Lenient repair, conlleval style: a stray `I` (after `O` or at the
    /// start) becomes `B`; a collapsed `I±` whose sentiment differs from the
    /// running chunk becomes `B±`. Model predictions are always scorable
    /// after repair.
    pub fn repair(&self) -> TagSequence {
        match self {
            TagSequence::Sc(t) => TagSequence::Sc(t.clone()),
            TagSequence::Ae(tags) => {
                let mut out = Vec::with_capacity(tags.len());
                let mut in_chunk = false;
                for &tag in tags {
                    let fixed = match tag {
                        AeTag::Inside if !in_chunk => AeTag::Begin,
                        t => t,
                    };
                    in_chunk = fixed != AeTag::Outside;
                    out.push(fixed);
                }
                TagSequence::Ae(out)
            }
            TagSequence::Collapsed(tags) => {
                let mut out = Vec::with_capacity(tags.len());
                let mut running: Option<SentimentClass> = None;
                for &tag in tags {
                    let fixed = match tag {
                        CollapsedTag::Inside(s) if running != Some(s) => CollapsedTag::Begin(s),
                        t => t,
                    };
                    running = fixed.sentiment();
                    out.push(fixed);
                }
                TagSequence::Collapsed(out)
            }
        }
    }

    /// Label strings per the CoNLL output contract ("O", "B", "I-NEG", ...).
    pub fn label_strings(&self) -> Vec<String> {
        match self {
            TagSequence::Ae(t) => t.iter().map(|x| x.as_str().to_string()).collect(),
            TagSequence::Sc(t) => t
                .iter()
                .map(|x| match x {
                    None => "O".to_string(),
                    Some(s) => s.tag_suffix().to_string(),
                })
                .collect(),
            TagSequence::Collapsed(t) => t.iter().map(|x| x.label_string()).collect(),
        }
    }

    /// Collapsed view of this sequence, when one exists without inventing
    /// sentiments: collapsed sequences pass through, and all-`O` sequences of
    /// any positional scheme convert (an aspect-free sentence is written
    /// identically under AE and collapsed labels, so parsing cannot tell them
    /// apart). Anything with an actual chunk but no sentiment is `None`.
    pub fn as_collapsed(&self) -> Option<TagSequence> {
        match self {
            TagSequence::Collapsed(_) => Some(self.clone()),
            TagSequence::Ae(tags) if tags.iter().all(|&t| t == AeTag::Outside) => {
                Some(TagSequence::Collapsed(vec![CollapsedTag::Outside; tags.len()]))
            }
            _ => None,
        }
    }

    /// Parses label strings, inferring AE vs collapsed from the presence of a
    /// sentiment suffix. A sequence of bare `O`/`B`/`I` parses as AE.
    pub fn from_label_strings(labels: &[String]) -> Result<TagSequence, LabelError> {
        let collapsed = labels.iter().any(|l| l.contains('-'));
        if collapsed {
            let tags = labels
                .iter()
                .map(|l| CollapsedTag::parse(l).ok_or_else(|| LabelError::UnknownLabel(l.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TagSequence::Collapsed(tags))
        } else {
            let tags = labels
                .iter()
                .map(|l| AeTag::from_str_tag(l).ok_or_else(|| LabelError::UnknownLabel(l.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TagSequence::Ae(tags))
        }
    }
}

/// A contiguous aspect mention: token span `[start, end)` plus an optional
/// sentiment (absent for plain AE chunks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub start: usize,
    pub end: usize,
    pub sentiment: Option<SentimentClass>,
}

impl Chunk {
    pub fn new(start: usize, end: usize, sentiment: Option<SentimentClass>) -> Self {
        debug_assert!(start < end);
        Chunk { start, end, sentiment }
    }
}

/// Fuses an AE sequence and an SC sequence into a collapsed sequence.
///
/// Requires the two inputs to agree: a token is inside an aspect iff it
/// carries a sentiment.
pub fn collapse(ae: &TagSequence, sc: &TagSequence) -> Result<TagSequence, LabelError> {
    let TagSequence::Ae(ae_tags) = ae else {
        return Err(LabelError::SchemeMismatch { expected: "AE", got: ae.scheme() });
    };
    let TagSequence::Sc(sc_tags) = sc else {
        return Err(LabelError::SchemeMismatch { expected: "SC", got: sc.scheme() });
    };
    if ae_tags.len() != sc_tags.len() {
        return Err(LabelError::LengthMismatch { left: ae_tags.len(), right: sc_tags.len() });
    }
    let mut out = Vec::with_capacity(ae_tags.len());
    for (i, (&a, &s)) in ae_tags.iter().zip(sc_tags.iter()).enumerate() {
        let tag = match (a, s) {
            (AeTag::Outside, None) => CollapsedTag::Outside,
            (AeTag::Begin, Some(sent)) => CollapsedTag::Begin(sent),
            (AeTag::Inside, Some(sent)) => CollapsedTag::Inside(sent),
            (AeTag::Outside, Some(sent)) => {
                return Err(LabelError::MembershipMismatch {
                    index: i,
                    detail: format!("O token carries sentiment {sent}"),
                })
            }
            (pos, None) => {
                return Err(LabelError::MembershipMismatch {
                    index: i,
                    detail: format!("{} token has no sentiment", pos.as_str()),
                })
            }
        };
        out.push(tag);
    }
    Ok(TagSequence::Collapsed(out))
}

/// Splits a collapsed sequence back into an AE sequence plus sentiment-bearing
/// chunks.
///
/// Lenient position repair is applied first (stray `I±` starts a chunk). Each
/// positional `B(I)*` run becomes one chunk whose sentiment is the majority
/// sentiment of its member tags. Ties are broken by the chunk's first tag's
/// sentiment when it is among the tied majority; otherwise by the earliest
/// member tag whose sentiment is. This tie rule is a deterministic refinement
/// of the underspecified "simple heuristics" and is part of the documented
/// contract.
pub fn decouple(collapsed: &TagSequence) -> Result<(TagSequence, Vec<Chunk>), LabelError> {
    let TagSequence::Collapsed(tags) = collapsed else {
        return Err(LabelError::SchemeMismatch { expected: "collapsed", got: collapsed.scheme() });
    };
    // Positional repair only: a leading I± opens a chunk but sentiment
    // changes inside a run do NOT split it (unlike extract_chunks).
    let mut ae = Vec::with_capacity(tags.len());
    let mut chunks = Vec::new();
    let mut run: Vec<(usize, SentimentClass)> = Vec::new();
    let flush = |run: &mut Vec<(usize, SentimentClass)>, chunks: &mut Vec<Chunk>| {
        if let (Some(&(first, first_sent)), Some(&(last, _))) = (run.first(), run.last()) {
            chunks.push(Chunk::new(first, last + 1, Some(majority_sentiment(run, first_sent))));
        }
        run.clear();
    };
    for (i, &tag) in tags.iter().enumerate() {
        match tag {
            CollapsedTag::Outside => {
                flush(&mut run, &mut chunks);
                ae.push(AeTag::Outside);
            }
            CollapsedTag::Begin(s) => {
                flush(&mut run, &mut chunks);
                run.push((i, s));
                ae.push(AeTag::Begin);
            }
            CollapsedTag::Inside(s) => {
                if run.is_empty() {
                    // stray I±: starts a chunk after repair
                    run.push((i, s));
                    ae.push(AeTag::Begin);
                } else {
                    run.push((i, s));
                    ae.push(AeTag::Inside);
                }
            }
        }
    }
    flush(&mut run, &mut chunks);
    Ok((TagSequence::Ae(ae), chunks))
}

fn majority_sentiment(run: &[(usize, SentimentClass)], first: SentimentClass) -> SentimentClass {
    let mut counts = [0usize; 3];
    for &(_, s) in run {
        counts[s as usize] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    if counts[first as usize] == max {
        return first;
    }
    run.iter()
        .map(|&(_, s)| s)
        .find(|&s| counts[s as usize] == max)
        .unwrap_or(first)
}

/// Extracts chunks with conlleval boundary conventions (lenient mode).
///
/// A chunk starts at a `B`, at an `I` following `O` or start-of-sequence, or
/// at an `I±` whose sentiment differs from the running chunk's. Boundaries
/// therefore match what the CoNLL scorer counts, which is not always what
/// [`decouple`] produces on mixed-sentiment runs.
pub fn extract_chunks(tags: &TagSequence) -> Result<Vec<Chunk>, LabelError> {
    let repaired = tags.repair();
    let per_token: Vec<(AeTag, Option<SentimentClass>)> = match &repaired {
        TagSequence::Ae(t) => t.iter().map(|&x| (x, None)).collect(),
        TagSequence::Collapsed(t) => t.iter().map(|&x| (x.position(), x.sentiment())).collect(),
        TagSequence::Sc(_) => {
            return Err(LabelError::SchemeMismatch { expected: "AE or collapsed", got: Scheme::Sc })
        }
    };
    let mut chunks = Vec::new();
    let mut open: Option<(usize, Option<SentimentClass>)> = None;
    for (i, &(pos, sent)) in per_token.iter().enumerate() {
        match pos {
            AeTag::Outside => {
                if let Some((start, s)) = open.take() {
                    chunks.push(Chunk::new(start, i, s));
                }
            }
            AeTag::Begin => {
                if let Some((start, s)) = open.take() {
                    chunks.push(Chunk::new(start, i, s));
                }
                open = Some((i, sent));
            }
            // After repair an Inside always continues the open chunk.
            AeTag::Inside => {}
        }
    }
    if let Some((start, s)) = open {
        chunks.push(Chunk::new(start, per_token.len(), s));
    }
    Ok(chunks)
}

/// Ordered label vocabulary for one scheme: a bijection between labels and
/// dense indices, stable across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagVocab {
    scheme: Scheme,
    sentiments: Vec<SentimentClass>,
    labels: Vec<String>,
}

impl TagVocab {
    /// Builds the label set: AE is `[O, B, I]`; collapsed is `[O]` followed by
    /// `B-x, I-x` pairs in canonical sentiment order.
    pub fn new(scheme: Scheme, sentiments: &[SentimentClass]) -> Result<Self, LabelError> {
        let sentiments = canonical_sentiment_order(sentiments);
        let labels = match scheme {
            Scheme::Ae => vec!["O".to_string(), "B".to_string(), "I".to_string()],
            Scheme::Collapsed => {
                if sentiments.is_empty() {
                    return Err(LabelError::EmptySentimentSet);
                }
                let mut labels = vec!["O".to_string()];
                for &s in &sentiments {
                    labels.push(format!("B-{}", s.tag_suffix()));
                    labels.push(format!("I-{}", s.tag_suffix()));
                }
                labels
            }
            Scheme::Sc => {
                let mut labels = vec!["O".to_string()];
                labels.extend(sentiments.iter().map(|s| s.tag_suffix().to_string()));
                labels
            }
        };
        Ok(TagVocab { scheme, sentiments, labels })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn sentiments(&self) -> &[SentimentClass] {
        &self.sentiments
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Result<&str, LabelError> {
        self.labels
            .get(index)
            .map(String::as_str)
            .ok_or(LabelError::IndexOutOfRange { index, size: self.labels.len() })
    }

    pub fn index(&self, label: &str) -> Result<usize, LabelError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LabelError::UnknownLabel(label.to_string()))
    }

    /// Encodes a tag sequence into label indices.
    pub fn encode(&self, tags: &TagSequence) -> Result<Vec<usize>, LabelError> {
        if tags.scheme() != self.scheme {
            return Err(LabelError::SchemeMismatch {
                expected: match self.scheme {
                    Scheme::Ae => "AE",
                    Scheme::Sc => "SC",
                    Scheme::Collapsed => "collapsed",
                },
                got: tags.scheme(),
            });
        }
        tags.label_strings().iter().map(|l| self.index(l)).collect()
    }

    /// Decodes label indices back into a tag sequence.
    pub fn decode(&self, indices: &[usize]) -> Result<TagSequence, LabelError> {
        let labels: Vec<String> =
            indices.iter().map(|&i| self.label(i).map(str::to_string)).collect::<Result<_, _>>()?;
        match self.scheme {
            Scheme::Ae => {
                let tags = labels
                    .iter()
                    .map(|l| AeTag::from_str_tag(l).ok_or_else(|| LabelError::UnknownLabel(l.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TagSequence::Ae(tags))
            }
            Scheme::Collapsed => {
                let tags = labels
                    .iter()
                    .map(|l| CollapsedTag::parse(l).ok_or_else(|| LabelError::UnknownLabel(l.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TagSequence::Collapsed(tags))
            }
            Scheme::Sc => {
                let tags = labels
                    .iter()
                    .map(|l| {
                        if l == "O" {
                            Ok(None)
                        } else {
                            SentimentClass::from_tag_suffix(l)
                                .map(Some)
                                .ok_or_else(|| LabelError::UnknownLabel(l.clone()))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TagSequence::Sc(tags))
            }
        }
    }
}

/// Dedups and orders a sentiment set canonically (positive, negative, neutral).
pub fn canonical_sentiment_order(sentiments: &[SentimentClass]) -> Vec<SentimentClass> {
    CANONICAL_SENTIMENTS.iter().copied().filter(|s| sentiments.contains(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentClass::{Negative as Neg, Neutral as Neu, Positive as Pos};

    fn ae(tags: &str) -> TagSequence {
        TagSequence::Ae(
            tags.split_whitespace().map(|t| AeTag::from_str_tag(t).unwrap()).collect(),
        )
    }

    fn collapsed(tags: &str) -> TagSequence {
        TagSequence::Collapsed(
            tags.split_whitespace().map(|t| CollapsedTag::parse(t).unwrap()).collect(),
        )
    }

    fn sc(tags: &[Option<SentimentClass>]) -> TagSequence {
        TagSequence::Sc(tags.to_vec())
    }

    #[test]
    fn collapse_table_example() {
        // "I love the saturated colors !" with aspect "saturated colors"
        let ae_seq = ae("O O O B I O");
        let sc_seq = sc(&[None, None, None, Some(Pos), Some(Pos), None]);
        let got = collapse(&ae_seq, &sc_seq).unwrap();
        assert_eq!(got, collapsed("O O O B-POS I-POS O"));
    }

    #[test]
    fn collapse_all_outside() {
        let got = collapse(&ae("O O"), &sc(&[None, None])).unwrap();
        assert_eq!(got, collapsed("O O"));
    }

    #[test]
    fn collapse_negative_run() {
        let got = collapse(&ae("B I I"), &sc(&[Some(Neg), Some(Neg), Some(Neg)])).unwrap();
        assert_eq!(got, collapsed("B-NEG I-NEG I-NEG"));
    }

    #[test]
    fn collapse_length_mismatch() {
        let err = collapse(&ae("O B"), &sc(&[None])).unwrap_err();
        assert!(matches!(err, LabelError::LengthMismatch { left: 2, right: 1 }));
    }

    #[test]
    fn collapse_membership_mismatch_names_index() {
        let err = collapse(&ae("O B"), &sc(&[None, None])).unwrap_err();
        match err {
            LabelError::MembershipMismatch { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn decouple_unanimous() {
        let (ae_seq, chunks) = decouple(&collapsed("O B-POS I-POS O")).unwrap();
        assert_eq!(ae_seq, ae("O B I O"));
        assert_eq!(chunks, vec![Chunk::new(1, 3, Some(Pos))]);
    }

    #[test]
    fn decouple_majority_vote() {
        let (ae_seq, chunks) = decouple(&collapsed("B-POS I-NEG I-POS")).unwrap();
        assert_eq!(ae_seq, ae("B I I"));
        assert_eq!(chunks, vec![Chunk::new(0, 3, Some(Pos))]);
    }

    #[test]
    fn decouple_tie_first_tag_wins() {
        let (ae_seq, chunks) = decouple(&collapsed("B-POS I-NEG")).unwrap();
        assert_eq!(ae_seq, ae("B I"));
        assert_eq!(chunks, vec![Chunk::new(0, 2, Some(Pos))]);
    }

    #[test]
    fn decouple_tie_first_tag_not_in_argmax() {
        // counts: POS 1, NEG 2, NEU 2 -> tie between NEG and NEU, first tag POS
        // not among the max -> earliest member with a majority sentiment (NEG).
        let (_, chunks) = decouple(&collapsed("B-POS I-NEG I-NEG I-NEU I-NEU")).unwrap();
        assert_eq!(chunks[0].sentiment, Some(Neg));
    }

    #[test]
    fn decouple_stray_inside_becomes_begin() {
        let (ae_seq, chunks) = decouple(&collapsed("I-POS I-POS")).unwrap();
        assert_eq!(ae_seq, ae("B I"));
        assert_eq!(chunks, vec![Chunk::new(0, 2, Some(Pos))]);
    }

    #[test]
    fn extract_two_runs() {
        let chunks = extract_chunks(&ae("O B I O B")).unwrap();
        assert_eq!(
            chunks,
            vec![Chunk::new(1, 3, None), Chunk::new(4, 5, None)]
        );
    }

    #[test]
    fn extract_no_aspects() {
        assert!(extract_chunks(&ae("O O O")).unwrap().is_empty());
    }

    #[test]
    fn extract_leading_inside_lenient() {
        let chunks = extract_chunks(&ae("I I")).unwrap();
        assert_eq!(chunks, vec![Chunk::new(0, 2, None)]);
    }

    #[test]
    fn extract_splits_on_sentiment_change() {
        // conlleval counts a type change as a chunk boundary, unlike decouple.
        let chunks = extract_chunks(&collapsed("B-POS I-NEG")).unwrap();
        assert_eq!(
            chunks,
            vec![Chunk::new(0, 1, Some(Pos)), Chunk::new(1, 2, Some(Neg))]
        );
    }

    #[test]
    fn extract_b_after_i_starts_new() {
        let chunks = extract_chunks(&ae("B I B")).unwrap();
        assert_eq!(chunks, vec![Chunk::new(0, 2, None), Chunk::new(2, 3, None)]);
    }

    #[test]
    fn strict_validation_rejects_stray_inside() {
        assert!(ae("O I").validate_strict().is_err());
        assert!(ae("I O").validate_strict().is_err());
        assert!(ae("O B I").validate_strict().is_ok());
        assert!(collapsed("O I-POS").validate_strict().is_err());
    }

    #[test]
    fn tagset_ae() {
        let v = TagVocab::new(Scheme::Ae, &[Neg]).unwrap();
        assert_eq!(v.labels(), &["O", "B", "I"]);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn tagset_collapsed_two_sentiments() {
        let v = TagVocab::new(Scheme::Collapsed, &[Neg, Pos]).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.labels(), &["O", "B-POS", "I-POS", "B-NEG", "I-NEG"]);
    }

    #[test]
    fn tagset_collapsed_three_sentiments() {
        let v = TagVocab::new(Scheme::Collapsed, &[Neu, Pos, Neg]).unwrap();
        assert_eq!(v.len(), 7);
    }

    #[test]
    fn tagset_collapsed_empty_sentiments_rejected() {
        assert!(matches!(
            TagVocab::new(Scheme::Collapsed, &[]),
            Err(LabelError::EmptySentimentSet)
        ));
    }

    #[test]
    fn tagset_index_label_roundtrip() {
        let v = TagVocab::new(Scheme::Collapsed, &[Pos, Neg, Neu]).unwrap();
        for i in 0..v.len() {
            let label = v.label(i).unwrap().to_string();
            assert_eq!(v.index(&label).unwrap(), i);
        }
        assert!(v.index("B-XYZ").is_err());
        assert!(v.label(99).is_err());
    }

    #[test]
    fn encode_decode_roundtrip() {
        let v = TagVocab::new(Scheme::Collapsed, &[Pos, Neg]).unwrap();
        let seq = collapsed("O B-POS I-POS B-NEG O");
        let idx = v.encode(&seq).unwrap();
        assert_eq!(v.decode(&idx).unwrap(), seq);
    }

    #[test]
    fn sentiment_serialization_roundtrip() {
        for s in CANONICAL_SENTIMENTS {
            let json = serde_json::to_string(&s).unwrap();
            let back: SentimentClass = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
        }
        assert_eq!(serde_json::to_string(&Pos).unwrap(), "\"positive\"");
    }

    #[test]
    fn chunks_cover_exactly_bi_positions() {
        // chunks are disjoint, sorted, and cover exactly the B/I positions
        let seq = ae("O B I O I I B O");
        let chunks = extract_chunks(&seq).unwrap();
        let mut covered = vec![false; seq.len()];
        let mut prev_end = 0;
        for c in &chunks {
            assert!(c.start >= prev_end, "chunks overlap or unsorted");
            prev_end = c.end;
            for pos in c.start..c.end {
                covered[pos] = true;
            }
        }
        let TagSequence::Ae(tags) = &seq else { unreachable!() };
        for (i, &t) in tags.iter().enumerate() {
            assert_eq!(covered[i], t != AeTag::Outside);
        }
    }
}
