//! Chunk-level and sentence-level scoring, report aggregation, and run
//! comparison.
//!
//! Aspect extraction is scored exactly like the CoNLL shared-task scorer
//! (`conlleval`): a chunk counts as correct only on an exact boundary match,
//! plus an exact sentiment match when the tags carry one. Ill-formed
//! predictions are repaired leniently before counting, again matching the
//! scorer. Sentiment classification is scored per class with a macro
//! average; which inventory of items is classified (chunks or sentences)
//! depends on the setting, so the two variants are separate functions.
//!
//! [`MetricsReport`] is the one JSON-serializable container for all of it,
//! including per-fold or per-seed breakdowns and paired t-test comparisons
//! against a named baseline run.

mod stats;

pub use stats::{paired_ttest, TtestOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{
    decouple, extract_chunks, LabelError, Scheme, SentimentClass, TagSequence,
    CANONICAL_SENTIMENTS,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold has {gold} sentences but predictions have {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold has {gold} tokens but prediction has {pred}")]
    TokenCount { sentence: usize, gold: usize, pred: usize },
    #[error("sentence {sentence}: gold uses the {gold} scheme but prediction uses {pred}")]
    SchemeMismatch { sentence: usize, gold: Scheme, pred: Scheme },
    #[error("vectors have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("paired test needs at least 2 runs, got {got}")]
    TooFewRuns { got: usize },
    #[error("non-finite metric value {value}")]
    NonFinite { value: f64 },
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// Precision, recall, and their harmonic mean, all in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Builds the triple from raw counts. Empty denominators score 0, the
    /// same convention as the CoNLL scorer.
    pub fn from_counts(correct: usize, predicted: usize, gold: usize) -> Prf {
        let p = if predicted == 0 { 0.0 } else { correct as f64 / predicted as f64 };
        let r = if gold == 0 { 0.0 } else { correct as f64 / gold as f64 };
        Prf { precision: p, recall: r, f1: f1_of(p, r) }
    }

    pub const fn zero() -> Prf {
        Prf { precision: 0.0, recall: 0.0, f1: 0.0 }
    }
}

fn f1_of(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn mean_prf(items: &[Prf]) -> Option<Prf> {
    if items.is_empty() {
        return None;
    }
    let n = items.len() as f64;
    Some(Prf {
        precision: items.iter().map(|x| x.precision).sum::<f64>() / n,
        recall: items.iter().map(|x| x.recall).sum::<f64>() / n,
        f1: items.iter().map(|x| x.f1).sum::<f64>() / n,
    })
}

/// Scores for one sentiment class, with the supports that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub class: SentimentClass,
    pub gold_support: usize,
    pub pred_support: usize,
    pub score: Prf,
}

/// One run's metrics inside an aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub metrics: MetricsReport,
}

/// A paired t-test of this run against a named baseline on one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub metric: String,
    pub outcome: TtestOutcome,
}

/// Everything a run reports. Parts that do not apply stay `None`/empty:
/// a Simple-setting run has no sentiment section, a single run has no
/// per-fold breakdown.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Chunk-level aspect extraction scores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ae: Option<Prf>,
    /// Per-sentiment-class scores (chunk- or sentence-level by setting).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassScore>,
    /// Macro average over classes with support in gold or predictions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macro_avg: Option<Prf>,
    /// Fraction of sentences whose predicted class is the gold class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_accuracy: Option<f64>,
    /// Per-fold or per-seed breakdown when this report is an aggregate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<NamedReport>,
    /// Significance tests against named baseline runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
}

impl MetricsReport {
    /// Fills each empty part of `self` from `other`; present parts win.
    /// Combines an aspect-extraction report with a sentiment report.
    pub fn merge(mut self, other: MetricsReport) -> MetricsReport {
        self.ae = self.ae.or(other.ae);
        if self.classes.is_empty() {
            self.classes = other.classes;
        }
        self.macro_avg = self.macro_avg.or(other.macro_avg);
        self.sentence_accuracy = self.sentence_accuracy.or(other.sentence_accuracy);
        if self.runs.is_empty() {
            self.runs = other.runs;
        }
        if self.comparisons.is_empty() {
            self.comparisons = other.comparisons;
        }
        self
    }

    /// Means over a set of runs, with the individual runs kept for paired
    /// tests. Each optional field is averaged over the runs that report it;
    /// per-class rows are averaged per class and their supports summed.
    pub fn aggregate(runs: Vec<NamedReport>) -> MetricsReport {
        let ae_parts: Vec<Prf> = runs.iter().filter_map(|r| r.metrics.ae).collect();
        let macro_parts: Vec<Prf> =
            runs.iter().filter_map(|r| r.metrics.macro_avg).collect();
        let acc_parts: Vec<f64> =
            runs.iter().filter_map(|r| r.metrics.sentence_accuracy).collect();
        let mut classes = Vec::new();
        for &class in &CANONICAL_SENTIMENTS {
            let rows: Vec<&ClassScore> = runs
                .iter()
                .flat_map(|r| r.metrics.classes.iter())
                .filter(|c| c.class == class)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let scores: Vec<Prf> = rows.iter().map(|c| c.score).collect();
            classes.push(ClassScore {
                class,
                gold_support: rows.iter().map(|c| c.gold_support).sum(),
                pred_support: rows.iter().map(|c| c.pred_support).sum(),
                score: mean_prf(&scores).expect("rows checked non-empty"),
            });
        }
        MetricsReport {
            ae: mean_prf(&ae_parts),
            classes,
            macro_avg: mean_prf(&macro_parts),
            sentence_accuracy: if acc_parts.is_empty() {
                None
            } else {
                Some(acc_parts.iter().sum::<f64>() / acc_parts.len() as f64)
            },
            runs,
            comparisons: Vec::new(),
        }
    }

    /// Per-run values of one metric, in run order. Recognized names:
    /// `ae_f1`, `ae_precision`, `ae_recall`, `macro_f1`, `sentence_accuracy`.
    pub fn run_values(&self, metric: &str) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| match metric {
                "ae_f1" => r.metrics.ae.map(|x| x.f1),
                "ae_precision" => r.metrics.ae.map(|x| x.precision),
                "ae_recall" => r.metrics.ae.map(|x| x.recall),
                "macro_f1" => r.metrics.macro_avg.map(|x| x.f1),
                "sentence_accuracy" => r.metrics.sentence_accuracy,
                _ => None,
            })
            .collect()
    }
}

fn check_aligned(gold: &[TagSequence], pred: &[TagSequence]) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount { gold: gold.len(), pred: pred.len() });
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.scheme() != p.scheme() {
            return Err(EvalError::SchemeMismatch {
                sentence: i,
                gold: g.scheme(),
                pred: p.scheme(),
            });
        }
        if g.len() != p.len() {
            return Err(EvalError::TokenCount { sentence: i, gold: g.len(), pred: p.len() });
        }
    }
    Ok(())
}

/// Chunk-level aspect extraction scores over an aligned corpus.
///
/// Counts micro-averaged over all sentences: precision is correct chunks
/// over predicted chunks, recall is correct chunks over gold chunks, and a
/// chunk is correct only on an exact `(start, end)` match, plus an equal
/// sentiment under the collapsed scheme. Predictions (and gold) pass
/// through the same lenient repair the CoNLL scorer applies, so ill-formed
/// tag runs are scored, not rejected. An empty corpus scores zero.
pub fn evaluate_chunks(
    gold: &[TagSequence],
    pred: &[TagSequence],
) -> Result<MetricsReport, EvalError> {
    check_aligned(gold, pred)?;
    let mut correct = 0;
    let mut n_pred = 0;
    let mut n_gold = 0;
    for (g, p) in gold.iter().zip(pred) {
        let gc = extract_chunks(g)?;
        let pc = extract_chunks(p)?;
        correct += pc.iter().filter(|c| gc.contains(c)).count();
        n_pred += pc.len();
        n_gold += gc.len();
    }
    Ok(MetricsReport {
        ae: Some(Prf::from_counts(correct, n_pred, n_gold)),
        ..MetricsReport::default()
    })
}

fn macro_over(classes: &[ClassScore]) -> Option<Prf> {
    let kept: Vec<Prf> = classes
        .iter()
        .filter(|c| c.gold_support + c.pred_support > 0)
        .map(|c| c.score)
        .collect();
    mean_prf(&kept)
}

/// Per-sentiment-class chunk scores for collapsed-tag predictions.
///
/// Chunk inventories come from [`decouple`], so a run of mixed sentiments
/// stays one chunk and votes on its sentiment, rather than splitting at
/// each change the way the boundary scorer does. A chunk is correct for
/// class `c` when gold and prediction agree exactly on span and both carry
/// `c`. Classes with no support on either side are excluded from the macro
/// average (their rows still appear, scored zero).
pub fn evaluate_chunk_sentiment(
    gold: &[TagSequence],
    pred: &[TagSequence],
) -> Result<MetricsReport, EvalError> {
    check_aligned(gold, pred)?;
    let mut correct = [0usize; 3];
    let mut n_gold = [0usize; 3];
    let mut n_pred = [0usize; 3];
    for (g, p) in gold.iter().zip(pred) {
        let (_, gc) = decouple(g)?;
        let (_, pc) = decouple(p)?;
        for c in &gc {
            n_gold[c.sentiment.expect("decoupled chunks carry sentiment") as usize] += 1;
        }
        for c in &pc {
            let s = c.sentiment.expect("decoupled chunks carry sentiment") as usize;
            n_pred[s] += 1;
            if gc.contains(c) {
                correct[s] += 1;
            }
        }
    }
    let classes: Vec<ClassScore> = CANONICAL_SENTIMENTS
        .iter()
        .map(|&class| {
            let i = class as usize;
            ClassScore {
                class,
                gold_support: n_gold[i],
                pred_support: n_pred[i],
                score: Prf::from_counts(correct[i], n_pred[i], n_gold[i]),
            }
        })
        .collect();
    let macro_avg = macro_over(&classes);
    Ok(MetricsReport { classes, macro_avg, ..MetricsReport::default() })
}

/// Sentence-level sentiment implied by a collapsed tag sequence: the
/// majority sentiment over its decoupled chunks, ties going to the earliest
/// chunk whose sentiment is tied for the lead. A sentence with no aspect
/// chunks reads as neutral.
pub fn sentence_sentiment(tags: &TagSequence) -> Result<SentimentClass, EvalError> {
    let (_, chunks) = decouple(tags)?;
    let mut counts = [0usize; 3];
    for c in &chunks {
        if let Some(s) = c.sentiment {
            counts[s as usize] += 1;
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Ok(SentimentClass::Neutral);
    }
    Ok(chunks
        .iter()
        .filter_map(|c| c.sentiment)
        .find(|&s| counts[s as usize] == max)
        .expect("some chunk carries the maximal sentiment"))
}

/// Sentence-level classification scores: per-class P/R/F1, macro average
/// over classes with any support, and plain accuracy.
pub fn evaluate_sentence_sentiment(
    gold: &[SentimentClass],
    pred: &[SentimentClass],
) -> Result<MetricsReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount { gold: gold.len(), pred: pred.len() });
    }
    let mut correct = [0usize; 3];
    let mut n_gold = [0usize; 3];
    let mut n_pred = [0usize; 3];
    let mut hits = 0usize;
    for (&g, &p) in gold.iter().zip(pred) {
        n_gold[g as usize] += 1;
        n_pred[p as usize] += 1;
        if g == p {
            correct[g as usize] += 1;
            hits += 1;
        }
    }
    let classes: Vec<ClassScore> = CANONICAL_SENTIMENTS
        .iter()
        .map(|&class| {
            let i = class as usize;
            ClassScore {
                class,
                gold_support: n_gold[i],
                pred_support: n_pred[i],
                score: Prf::from_counts(correct[i], n_pred[i], n_gold[i]),
            }
        })
        .collect();
    let macro_avg = macro_over(&classes);
    let sentence_accuracy =
        if gold.is_empty() { None } else { Some(hits as f64 / gold.len() as f64) };
    Ok(MetricsReport { classes, macro_avg, sentence_accuracy, ..MetricsReport::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{AeTag, CollapsedTag};
    use SentimentClass::{Negative, Neutral, Positive};

    fn ae(tags: &[AeTag]) -> TagSequence {
        TagSequence::Ae(tags.to_vec())
    }

    fn col(tags: &[CollapsedTag]) -> TagSequence {
        TagSequence::Collapsed(tags.to_vec())
    }

    const B: AeTag = AeTag::Begin;
    const I: AeTag = AeTag::Inside;
    const O: AeTag = AeTag::Outside;

    #[test]
    fn perfect_match_scores_one() {
        let gold = vec![ae(&[B, I, O])];
        let report = evaluate_chunks(&gold, &gold).unwrap();
        let prf = report.ae.unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn boundary_mismatch_scores_zero() {
        let gold = vec![ae(&[B, I, O])];
        let pred = vec![ae(&[B, O, O])];
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn second_gold_chunk_missed_halves_recall() {
        let gold = vec![ae(&[B, O, B])];
        let pred = vec![ae(&[B, O, O])];
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert_eq!(prf.precision, 1.0);
        assert_eq!(prf.recall, 0.5);
        assert!((prf.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn collapsed_chunks_must_match_sentiment() {
        let gold = vec![col(&[CollapsedTag::Begin(Positive), CollapsedTag::Outside])];
        let pred = vec![col(&[CollapsedTag::Begin(Negative), CollapsedTag::Outside])];
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert_eq!((prf.precision, prf.recall), (0.0, 0.0));
    }

    #[test]
    fn sentiment_change_splits_chunks_in_boundary_scoring() {
        let gold = vec![col(&[CollapsedTag::Begin(Positive), CollapsedTag::Inside(Positive)])];
        let pred = vec![col(&[CollapsedTag::Begin(Positive), CollapsedTag::Inside(Negative)])];
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        // prediction splits into two chunks, neither spanning [0, 2)
        assert_eq!((prf.precision, prf.recall), (0.0, 0.0));
    }

    #[test]
    fn stray_inside_tags_are_repaired_before_scoring() {
        let gold = vec![ae(&[B, I])];
        let pred = vec![ae(&[I, I])];
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn counts_accumulate_across_sentences() {
        let gold = vec![ae(&[B, O]), ae(&[O, B])];
        let pred = vec![ae(&[B, B]), ae(&[B, O])];
        // matched: first chunk of sentence 1 only; predicted 3, gold 2
        let prf = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert!((prf.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(prf.recall, 0.5);
    }

    #[test]
    fn empty_corpus_scores_zero() {
        let prf = evaluate_chunks(&[], &[]).unwrap().ae.unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn misalignment_is_rejected() {
        let one = vec![ae(&[B])];
        assert!(matches!(
            evaluate_chunks(&one, &[]),
            Err(EvalError::SentenceCount { gold: 1, pred: 0 })
        ));
        assert!(matches!(
            evaluate_chunks(&one, &[ae(&[B, O])]),
            Err(EvalError::TokenCount { sentence: 0, gold: 1, pred: 2 })
        ));
        assert!(matches!(
            evaluate_chunks(&one, &[col(&[CollapsedTag::Begin(Positive)])]),
            Err(EvalError::SchemeMismatch { sentence: 0, .. })
        ));
    }

    #[test]
    fn chunk_sentiment_uses_majority_vote_not_splitting() {
        let gold = vec![col(&[
            CollapsedTag::Begin(Positive),
            CollapsedTag::Inside(Positive),
            CollapsedTag::Inside(Positive),
        ])];
        let pred = vec![col(&[
            CollapsedTag::Begin(Positive),
            CollapsedTag::Inside(Positive),
            CollapsedTag::Inside(Negative),
        ])];
        // boundary scoring splits the prediction and scores zero
        let strict = evaluate_chunks(&gold, &pred).unwrap().ae.unwrap();
        assert_eq!(strict.f1, 0.0);
        // decoupled scoring keeps one chunk whose vote is positive
        let report = evaluate_chunk_sentiment(&gold, &pred).unwrap();
        let pos = report.classes.iter().find(|c| c.class == Positive).unwrap();
        assert_eq!((pos.gold_support, pos.pred_support), (1, 1));
        assert_eq!(pos.score.f1, 1.0);
    }

    #[test]
    fn unsupported_classes_leave_the_macro_average() {
        let gold = vec![col(&[CollapsedTag::Begin(Positive), CollapsedTag::Outside])];
        let report = evaluate_chunk_sentiment(&gold, &gold).unwrap();
        assert_eq!(report.classes.len(), 3);
        let m = report.macro_avg.unwrap();
        // only the positive class has support, so the macro equals its row
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));

        let pred = vec![col(&[CollapsedTag::Begin(Negative), CollapsedTag::Outside])];
        let report = evaluate_chunk_sentiment(&gold, &pred).unwrap();
        let m = report.macro_avg.unwrap();
        // positive and negative both have support and both score zero;
        // neutral has none on either side and is excluded
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sentence_class_comes_from_chunk_majority() {
        let bp = CollapsedTag::Begin(Positive);
        let bn = CollapsedTag::Begin(Negative);
        let o = CollapsedTag::Outside;
        assert_eq!(sentence_sentiment(&col(&[o, o])).unwrap(), Neutral);
        assert_eq!(sentence_sentiment(&col(&[o, bn, o])).unwrap(), Negative);
        assert_eq!(sentence_sentiment(&col(&[bp, o, bn, o, bp])).unwrap(), Positive);
        // tie between one positive and one negative chunk: earliest wins
        assert_eq!(sentence_sentiment(&col(&[o, bn, o, bp])).unwrap(), Negative);
        // AE tags carry no sentiment to derive
        assert!(sentence_sentiment(&ae(&[B, O])).is_err());
    }

    #[test]
    fn classification_confusion_matches_hand_counts() {
        let gold = [Positive, Positive, Positive];
        let pred = [Positive, Positive, Negative];
        let report = evaluate_sentence_sentiment(&gold, &pred).unwrap();
        let pos = report.classes.iter().find(|c| c.class == Positive).unwrap();
        assert_eq!(pos.score.precision, 1.0);
        assert!((pos.score.recall - 2.0 / 3.0).abs() < 1e-12);
        let neg = report.classes.iter().find(|c| c.class == Negative).unwrap();
        assert_eq!((neg.gold_support, neg.pred_support), (0, 1));
        assert_eq!(neg.score.precision, 0.0);
        // neutral untouched on both sides: macro covers two classes
        let m = report.macro_avg.unwrap();
        assert!((m.precision - 0.5).abs() < 1e-12);
        assert!((report.sentence_accuracy.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_correct_classification_scores_one_everywhere() {
        let gold = [Positive, Negative, Neutral, Negative];
        let report = evaluate_sentence_sentiment(&gold, &gold).unwrap();
        for c in &report.classes {
            assert_eq!(c.score.f1, 1.0, "{:?}", c.class);
        }
        assert_eq!(report.macro_avg.unwrap().f1, 1.0);
        assert_eq!(report.sentence_accuracy, Some(1.0));
    }

    #[test]
    fn merge_combines_disjoint_parts() {
        let chunk_part = MetricsReport {
            ae: Some(Prf { precision: 0.5, recall: 1.0, f1: 2.0 / 3.0 }),
            ..MetricsReport::default()
        };
        let sc_part =
            evaluate_sentence_sentiment(&[Positive, Negative], &[Positive, Positive]).unwrap();
        let merged = chunk_part.clone().merge(sc_part.clone());
        assert_eq!(merged.ae, chunk_part.ae);
        assert_eq!(merged.classes, sc_part.classes);
        assert_eq!(merged.sentence_accuracy, Some(0.5));
    }

    #[test]
    fn aggregate_averages_runs_and_sums_supports() {
        let run = |p: f64, acc: f64| MetricsReport {
            ae: Some(Prf { precision: p, recall: p, f1: p }),
            classes: vec![ClassScore {
                class: Positive,
                gold_support: 2,
                pred_support: 1,
                score: Prf { precision: p, recall: p, f1: p },
            }],
            macro_avg: Some(Prf { precision: p, recall: p, f1: p }),
            sentence_accuracy: Some(acc),
            ..MetricsReport::default()
        };
        let agg = MetricsReport::aggregate(vec![
            NamedReport { name: "fold-0".into(), metrics: run(0.8, 0.9) },
            NamedReport { name: "fold-1".into(), metrics: run(0.6, 0.7) },
        ]);
        assert!((agg.ae.unwrap().f1 - 0.7).abs() < 1e-12);
        assert_eq!(agg.classes.len(), 1);
        assert_eq!(agg.classes[0].gold_support, 4);
        assert!((agg.classes[0].score.f1 - 0.7).abs() < 1e-12);
        assert!((agg.sentence_accuracy.unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(agg.run_values("ae_f1"), vec![0.8, 0.6]);
        assert_eq!(agg.run_values("sentence_accuracy"), vec![0.9, 0.7]);
    }

    #[test]
    fn report_serde_round_trip() {
        let mut report = evaluate_chunks(&[ae(&[B, I, O])], &[ae(&[B, O, O])]).unwrap();
        report.comparisons.push(Comparison {
            baseline: "text-only".into(),
            metric: "ae_f1".into(),
            outcome: TtestOutcome::Test { t: 2.5, df: 4, p: 0.066 },
        });
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: MetricsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
        // unreported parts stay out of the serialization
        assert!(!json.contains("sentence_accuracy"));
    }
}
