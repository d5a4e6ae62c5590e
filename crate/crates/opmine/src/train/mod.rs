//! Training loops with early stopping, k-fold cross-validation, multi-seed
//! runs, and the ablation grid.
//!
//! A run is deterministic given its seed: parameter init, epoch shuffling,
//! dropout, fold assignment, and validation splits all draw from streams
//! derived from `TrainConfig::seed`, so reruns reproduce losses bit for bit.
//! Folds and seeds are independent of each other by construction, which is
//! what lets [`cross_validate`] and [`multi_seed`] farm them out to worker
//! threads without changing any result.
//!
//! Batching builds one graph per mini-batch: parameters are bound once,
//! every sentence contributes its own forward pass, and the batch loss is
//! the mean. Sentences keep their true lengths; no padding ever reaches an
//! encoder, so batch composition cannot leak into the recurrences.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

use crate::autodiff::{AdamConfig, AdamState, AutodiffError, Graph};
use crate::eval::{
    evaluate_chunk_sentiment, evaluate_chunks, evaluate_sentence_sentiment, sentence_sentiment,
    EvalError, MetricsReport, NamedReport,
};
use crate::features::{FeatureSequence, Modality};
use crate::ingest::{filter_single_sentiment, EmbeddingTable, IngestError, Sentence, Vocabulary};
use crate::labels::{decouple, LabelError, Scheme, SentimentClass, TagSequence};
use crate::model::{
    feature_columns, EncoderStack, ModelConfig, ModelError, SentenceInput, Setting,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("empty {what} set")]
    EmptyDataset { what: &'static str },
    #[error("configuration: {detail}")]
    Config { detail: String },
    #[error("sentence {id}: {detail}")]
    Data { id: String, detail: String },
    #[error("non-finite loss in epoch {epoch} on batch [{}]", .batch_ids.join(", "))]
    NonFiniteLoss {
        epoch: usize,
        batch_ids: Vec<String>,
        #[source]
        source: AutodiffError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
}

/// Hyperparameters for one training run. `model` carries the architecture;
/// the rest drives the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelConfig::default(),
            batch_size: 8,
            max_epochs: 50,
            patience: 5,
            seed: 42,
            learning_rate: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        self.model.validate()?;
        let bad = |detail: String| Err(TrainError::Config { detail });
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        Ok(())
    }
}

/// A sentence plus whatever media features were extracted for it. Media
/// stays `None` for text-only corpora or sentences with no aligned span.
#[derive(Debug, Clone)]
pub struct CorpusSentence {
    pub sentence: Sentence,
    pub audio: Option<FeatureSequence>,
    pub video: Option<FeatureSequence>,
}

impl CorpusSentence {
    pub fn text_only(sentence: Sentence) -> Self {
        CorpusSentence { sentence, audio: None, video: None }
    }
}

/// One model-ready sentence: token ids, encoded gold tags, optional media
/// feature matrices, and the sentence-sentiment class index where the
/// setting uses one.
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub id: String,
    pub input: SentenceInput,
    /// Gold tag indices under the model's tag vocabulary.
    pub gold: Vec<usize>,
    /// Index into `ModelConfig::sentiments`.
    pub sentiment: Option<usize>,
}

/// Everything needed to build a fresh parameter stack for a run.
#[derive(Debug, Clone, Copy)]
pub struct StackSpec<'a> {
    pub vocab_len: usize,
    /// Consulted only when the model config asks for pre-trained vectors.
    pub embeddings: Option<&'a EmbeddingTable>,
}

/// Fixed train/validation/test split, shared across seeds.
#[derive(Debug, Clone, Copy)]
pub struct Splits<'a> {
    pub train: &'a [TrainExample],
    pub valid: &'a [TrainExample],
    pub test: &'a [TrainExample],
}

/// One epoch's summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean per-sentence loss over the epoch.
    pub train_loss: f64,
    /// Validation aspect-extraction F1 after the epoch.
    pub valid_ae_f1: f64,
}

/// A finished run: the best checkpoint seen, not the last one.
#[derive(Debug)]
pub struct TrainOutcome {
    pub model: EncoderStack,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_valid_f1: f64,
}

/// Decoded predictions for a set of examples. `sentence_classes` is present
/// exactly when the model carries a sentence head.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub tags: Vec<TagSequence>,
    pub sentence_classes: Option<Vec<SentimentClass>>,
}

/// Seed for an independent named stream derived from a run seed
/// (splitmix64 finalizer), so folds, splits, and workers never share one.
fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_FOLD_TRAIN: u64 = 1;
const STREAM_FOLD_VALID: u64 = 2;

/// Assignment of sentence indices to k folds: a seeded shuffle dealt
/// round-robin, so fold sizes differ by at most one and every index lands
/// in exactly one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<FoldPlan, TrainError> {
        if k < 2 {
            return Err(TrainError::Config { detail: format!("need at least 2 folds, got {k}") });
        }
        if n < k {
            return Err(TrainError::Config {
                detail: format!("dataset of {n} sentences cannot fill {k} folds"),
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut assignment = vec![0usize; n];
        for (pos, &idx) in order.iter().enumerate() {
            assignment[idx] = pos % k;
        }
        Ok(FoldPlan { k, seed, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fold id per sentence index.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Indices outside and inside `fold`, each in ascending order.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        debug_assert!(fold < self.k);
        let mut rest = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignment.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                rest.push(i);
            }
        }
        (rest, test)
    }
}

fn to_ae(seq: &TagSequence) -> Result<TagSequence, LabelError> {
    match seq {
        TagSequence::Ae(_) => Ok(seq.clone()),
        _ => Ok(decouple(seq)?.0),
    }
}

fn media_matrix(
    id: &str,
    seq: Option<&FeatureSequence>,
    modality: Modality,
    expected_dim: usize,
) -> Result<Option<crate::autodiff::Array>, TrainError> {
    let Some(seq) = seq else { return Ok(None) };
    if seq.modality != modality {
        return Err(TrainError::Data {
            id: id.to_string(),
            detail: format!("{modality:?} slot holds {:?} features", seq.modality),
        });
    }
    if seq.dim != expected_dim {
        return Err(TrainError::Data {
            id: id.to_string(),
            detail: format!(
                "{modality:?} features are {}-dimensional, the model expects {expected_dim}",
                seq.dim
            ),
        });
    }
    Ok(feature_columns(seq))
}

/// Turns raw corpus sentences into model-ready examples for the configured
/// setting.
///
/// Per setting: Simple trains on AE tags (collapsed gold is decoupled);
/// CAL trains on the collapsed tags directly; CSL and JSL keep only
/// sentences whose aspects agree on a single sentiment, filling the
/// sentence class (neutral when there are no aspects) and dropping the
/// rest. Media matrices are attached only for enabled modalities, after a
/// dimension check, and their absence is legal (the encoder substitutes
/// its learned blank frame).
pub fn prepare_examples(
    config: &ModelConfig,
    corpus: &[CorpusSentence],
    vocab: &Vocabulary,
) -> Result<Vec<TrainExample>, TrainError> {
    config.validate()?;
    let tag_vocab = config.tag_vocab()?;
    let single_sentiment = matches!(config.setting, Setting::Csl | Setting::Jsl);

    let mut out = Vec::new();
    for cs in corpus {
        let raw = &cs.sentence;
        raw.validate()?;
        if raw.tokens.is_empty() {
            return Err(TrainError::Data { id: raw.id.clone(), detail: "no tokens".into() });
        }
        let sentence = if single_sentiment {
            match filter_single_sentiment(std::slice::from_ref(raw)).pop() {
                Some(kept) => kept,
                None => continue,
            }
        } else {
            raw.clone()
        };
        let Some(gold) = &sentence.gold else {
            return Err(TrainError::Data { id: sentence.id.clone(), detail: "no gold tags".into() });
        };

        let gold_seq = match tag_vocab.scheme() {
            Scheme::Ae => to_ae(gold).map_err(|e| TrainError::Data {
                id: sentence.id.clone(),
                detail: e.to_string(),
            })?,
            Scheme::Collapsed => gold.as_collapsed().ok_or_else(|| TrainError::Data {
                id: sentence.id.clone(),
                detail: format!(
                    "{} needs collapsed gold tags, found {}",
                    config.setting,
                    gold.scheme()
                ),
            })?,
            Scheme::Sc => {
                return Err(TrainError::Config {
                    detail: "tag vocabulary uses the SC scheme".into(),
                })
            }
        };

        let mut input = SentenceInput::text(vocab.encode(&sentence));
        if config.use_audio {
            input.audio =
                media_matrix(&sentence.id, cs.audio.as_ref(), Modality::Audio, config.audio_input_dim)?;
        }
        if config.use_video {
            input.video =
                media_matrix(&sentence.id, cs.video.as_ref(), Modality::Video, config.video_input_dim)?;
        }

        let sentiment = if single_sentiment {
            let class = sentence.sentence_sentiment.ok_or_else(|| TrainError::Data {
                id: sentence.id.clone(),
                detail: "no sentence sentiment".into(),
            })?;
            let idx =
                config.sentiments.iter().position(|&c| c == class).ok_or_else(|| {
                    TrainError::Data {
                        id: sentence.id.clone(),
                        detail: format!("sentiment {class:?} is not in the configured classes"),
                    }
                })?;
            Some(idx)
        } else {
            None
        };

        out.push(TrainExample {
            id: sentence.id.clone(),
            input,
            gold: tag_vocab.encode(&gold_seq)?,
            sentiment,
        });
    }
    Ok(out)
}

/// Builds a freshly initialized stack for a run. All randomness comes from
/// `seed`, so the same seed and spec reproduce the parameters exactly.
/// Pre-trained vectors are used when the config requests them; requesting
/// them without providing a table is a configuration error.
pub fn init_stack(
    model: &ModelConfig,
    seed: u64,
    spec: &StackSpec<'_>,
) -> Result<EncoderStack, TrainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if model.use_pretrained_embeddings {
        let Some(table) = spec.embeddings else {
            return Err(TrainError::Config {
                detail: "config asks for pre-trained embeddings but none were provided".into(),
            });
        };
        if table.vocab_len() != spec.vocab_len {
            return Err(TrainError::Config {
                detail: format!(
                    "embedding table covers {} tokens, vocabulary has {}",
                    table.vocab_len(),
                    spec.vocab_len
                ),
            });
        }
        Ok(EncoderStack::with_embeddings(model.clone(), table, &mut rng)?)
    } else {
        Ok(EncoderStack::new(model.clone(), spec.vocab_len, &mut rng)?)
    }
}

fn check_examples(
    stack: &EncoderStack,
    examples: &[TrainExample],
    what: &'static str,
) -> Result<(), TrainError> {
    if examples.is_empty() {
        return Err(TrainError::EmptyDataset { what });
    }
    let vocab_len = stack.vocab_len();
    let needs_sentiment = stack.config().setting.has_sentence_head();
    for ex in examples {
        if let Some(&bad) = ex.input.token_ids.iter().find(|&&t| t >= vocab_len) {
            return Err(TrainError::Data {
                id: ex.id.clone(),
                detail: format!("token id {bad} outside the {vocab_len}-entry vocabulary"),
            });
        }
        if needs_sentiment && ex.sentiment.is_none() {
            return Err(TrainError::Data {
                id: ex.id.clone(),
                detail: "joint setting needs a sentence sentiment".into(),
            });
        }
    }
    Ok(())
}

/// Trains `stack` with Adam and early stopping on validation AE F1.
///
/// Every epoch shuffles the training set, walks it in `batch_size` chunks
/// (one graph per batch, mean loss), then scores the validation set. The
/// best-scoring parameters are snapshotted and restored at the end, so the
/// returned model is never worse on validation than anything observed.
/// A non-finite batch loss aborts with the offending sentence ids.
pub fn train(
    config: &TrainConfig,
    mut stack: EncoderStack,
    train_set: &[TrainExample],
    valid_set: &[TrainExample],
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if stack.config() != &config.model {
        return Err(TrainError::Config {
            detail: "stack was built from a different model config".into(),
        });
    }
    check_examples(&stack, train_set, "training")?;
    check_examples(&stack, valid_set, "validation")?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam =
        AdamState::new(AdamConfig::with_lr(config.learning_rate), &stack.store().shapes());

    let mut history = Vec::new();
    let mut best_f1 = f64::NEG_INFINITY;
    let mut best_epoch = 0usize;
    let mut best_store = None;
    let mut since_best = 0usize;

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let step = (|| -> Result<f64, TrainError> {
                let mut g = Graph::new();
                let bound = stack.bind(&mut g)?;
                let mut total = None;
                for &i in batch {
                    let ex = &train_set[i];
                    let states = stack.forward(&mut g, &bound, &ex.input, true, &mut rng)?;
                    let loss = stack.loss(&mut g, &bound, &states, &ex.gold, ex.sentiment)?;
                    total = Some(match total {
                        None => loss,
                        Some(acc) => g.add(acc, loss)?,
                    });
                }
                let total = total.expect("batches are never empty");
                let mean = g.scale(total, 1.0 / batch.len() as f64)?;
                let value = g.value(mean).scalar_value();
                g.backward(mean)?;
                let grads = stack.gradients(&g, &bound);
                adam.step(stack.store_mut().values_mut(), &grads);
                Ok(value)
            })();
            // the graph checks every op, so NaN or inf anywhere in the batch
            // surfaces here; attach which sentences were on board
            match step {
                Ok(value) => loss_sum += value * batch.len() as f64,
                Err(
                    TrainError::Autodiff(source @ AutodiffError::NonFinite { .. })
                    | TrainError::Model(ModelError::Autodiff(
                        source @ AutodiffError::NonFinite { .. },
                    )),
                ) => {
                    return Err(TrainError::NonFiniteLoss {
                        epoch,
                        batch_ids: batch.iter().map(|&i| train_set[i].id.clone()).collect(),
                        source,
                    });
                }
                Err(other) => return Err(other),
            }
        }

        let valid_f1 = ae_f1(&evaluate(&stack, valid_set)?);
        history.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train_set.len() as f64,
            valid_ae_f1: valid_f1,
        });
        // ties keep the latest snapshot: with a joint loss the other head
        // keeps improving after the stopping metric saturates
        if valid_f1 >= best_f1 {
            best_epoch = epoch;
            best_store = Some(stack.store().clone());
        }
        if valid_f1 > best_f1 {
            best_f1 = valid_f1;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }

    *stack.store_mut() = best_store.expect("at least one epoch ran");
    Ok(TrainOutcome { model: stack, history, best_epoch, best_valid_f1: best_f1 })
}

fn ae_f1(report: &MetricsReport) -> f64 {
    report.ae.map(|p| p.f1).unwrap_or(0.0)
}

/// Decodes tag sequences (and sentence classes, for models with a sentence
/// head) for every example, in order.
pub fn predict(
    stack: &EncoderStack,
    examples: &[TrainExample],
) -> Result<Predictions, TrainError> {
    let tag_vocab = stack.tag_vocab();
    let with_head = stack.config().setting.has_sentence_head();
    // inference never samples: dropout is inert outside training
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut tags = Vec::with_capacity(examples.len());
    let mut classes = Vec::new();
    for ex in examples {
        let mut g = Graph::new();
        let bound = stack.bind(&mut g)?;
        let states = stack.forward(&mut g, &bound, &ex.input, false, &mut rng)?;
        let best = stack.decode(g.value(states.emissions));
        tags.push(tag_vocab.decode(&best)?);
        if with_head {
            let logits = stack.sentence_logits(&mut g, &bound, states.pooled)?;
            let column = g.value(logits);
            let mut arg = 0;
            for k in 1..column.rows() {
                if column.get(k, 0) > column.get(arg, 0) {
                    arg = k;
                }
            }
            classes.push(stack.config().sentiments[arg]);
        }
    }
    Ok(Predictions { tags, sentence_classes: with_head.then_some(classes) })
}

/// Scores a model on examples, assembling the parts the setting calls for:
/// aspect-extraction F1 always (sentiment-blind for collapsed tags), plus
/// decoupled per-class chunk scores for CAL and sentence-classification
/// scores for CSL (classes recovered from the predicted tags) and JSL
/// (classes from the sentence head).
pub fn evaluate(
    stack: &EncoderStack,
    examples: &[TrainExample],
) -> Result<MetricsReport, TrainError> {
    if examples.is_empty() {
        return Err(TrainError::EmptyDataset { what: "evaluation" });
    }
    let predictions = predict(stack, examples)?;
    let tag_vocab = stack.tag_vocab();
    let gold: Vec<TagSequence> = examples
        .iter()
        .map(|ex| tag_vocab.decode(&ex.gold))
        .collect::<Result<_, _>>()?;

    let (gold_ae, pred_ae): (Vec<TagSequence>, Vec<TagSequence>) = match tag_vocab.scheme() {
        Scheme::Ae => (gold.clone(), predictions.tags.clone()),
        _ => (
            gold.iter().map(to_ae).collect::<Result<_, _>>()?,
            predictions.tags.iter().map(to_ae).collect::<Result<_, _>>()?,
        ),
    };
    let mut report = evaluate_chunks(&gold_ae, &pred_ae)?;

    let config = stack.config();
    match config.setting {
        Setting::Simple => {}
        Setting::Cal => {
            report = report.merge(evaluate_chunk_sentiment(&gold, &predictions.tags)?);
        }
        Setting::Csl => {
            let gold_classes = gold_sentence_classes(config, examples)?;
            let pred_classes: Vec<SentimentClass> = predictions
                .tags
                .iter()
                .map(sentence_sentiment)
                .collect::<Result<_, _>>()?;
            report = report.merge(evaluate_sentence_sentiment(&gold_classes, &pred_classes)?);
        }
        Setting::Jsl => {
            let gold_classes = gold_sentence_classes(config, examples)?;
            let pred_classes =
                predictions.sentence_classes.expect("joint models predict sentence classes");
            report = report.merge(evaluate_sentence_sentiment(&gold_classes, &pred_classes)?);
        }
    }
    Ok(report)
}

fn gold_sentence_classes(
    config: &ModelConfig,
    examples: &[TrainExample],
) -> Result<Vec<SentimentClass>, TrainError> {
    examples
        .iter()
        .map(|ex| {
            let idx = ex.sentiment.ok_or_else(|| TrainError::Data {
                id: ex.id.clone(),
                detail: "no gold sentence sentiment".into(),
            })?;
            config.sentiments.get(idx).copied().ok_or_else(|| TrainError::Data {
                id: ex.id.clone(),
                detail: format!("sentiment index {idx} outside the configured classes"),
            })
        })
        .collect()
}

/// Runs order-preserving tasks on up to `jobs` worker threads. Results come
/// back in task order; the first failing task's error (in that order) wins.
fn run_parallel<T, F>(jobs: usize, tasks: Vec<F>) -> Result<Vec<T>, TrainError>
where
    T: Send,
    F: FnOnce() -> Result<T, TrainError> + Send,
{
    let jobs = jobs.max(1).min(tasks.len().max(1));
    if jobs == 1 {
        return tasks.into_iter().map(|task| task()).collect();
    }
    let n = tasks.len();
    let slots: Vec<Mutex<Option<F>>> = tasks.into_iter().map(|t| Mutex::new(Some(t))).collect();
    let results: Vec<Mutex<Option<Result<T, TrainError>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let task = slots[i].lock().unwrap().take().expect("each task runs once");
                *results[i].lock().unwrap() = Some(task());
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot was filled"))
        .collect()
}

/// k-fold cross-validation: each fold trains a fresh stack on the other
/// folds (carving a seeded 10% validation split out of them, at least one
/// sentence) and is scored as that run's test set. Fold assignment and both
/// sub-seeds derive from `config.seed`, so results do not depend on `jobs`.
pub fn cross_validate(
    config: &TrainConfig,
    examples: &[TrainExample],
    spec: &StackSpec<'_>,
    k: usize,
    jobs: usize,
) -> Result<MetricsReport, TrainError> {
    config.validate()?;
    let plan = FoldPlan::new(examples.len(), k, config.seed)?;
    let tasks: Vec<_> = (0..k)
        .map(|fold| {
            let plan = &plan;
            move || {
                let (pool, test_idx) = plan.split(fold);
                if pool.len() < 2 {
                    return Err(TrainError::Config {
                        detail: format!("fold {fold} leaves too few sentences to train on"),
                    });
                }
                let mut pool: Vec<usize> = pool;
                let mut valid_rng = ChaCha8Rng::seed_from_u64(sub_seed(
                    config.seed,
                    STREAM_FOLD_VALID.wrapping_add((fold as u64) << 8),
                ));
                pool.shuffle(&mut valid_rng);
                let n_valid = (pool.len() / 10).max(1);
                let take = |idx: &[usize]| -> Vec<TrainExample> {
                    idx.iter().map(|&i| examples[i].clone()).collect()
                };
                let valid = take(&pool[..n_valid]);
                let train_part = take(&pool[n_valid..]);
                let test = take(&test_idx);

                let fold_config = TrainConfig {
                    seed: sub_seed(config.seed, STREAM_FOLD_TRAIN.wrapping_add((fold as u64) << 8)),
                    ..config.clone()
                };
                let stack = init_stack(&fold_config.model, fold_config.seed, spec)?;
                let outcome = train(&fold_config, stack, &train_part, &valid)?;
                let metrics = evaluate(&outcome.model, &test)?;
                Ok(NamedReport { name: format!("fold-{fold}"), metrics })
            }
        })
        .collect();
    let reports = run_parallel(jobs, tasks)?;
    Ok(MetricsReport::aggregate(reports))
}

/// One full run per seed on a fixed split, aggregated like folds.
pub fn multi_seed(
    config: &TrainConfig,
    splits: &Splits<'_>,
    seeds: &[u64],
    spec: &StackSpec<'_>,
    jobs: usize,
) -> Result<MetricsReport, TrainError> {
    if seeds.is_empty() {
        return Err(TrainError::Config { detail: "no seeds given".into() });
    }
    config.validate()?;
    let tasks: Vec<_> = seeds
        .iter()
        .map(|&seed| {
            move || {
                let run_config = TrainConfig { seed, ..config.clone() };
                let stack = init_stack(&run_config.model, seed, spec)?;
                let outcome = train(&run_config, stack, splits.train, splits.valid)?;
                let metrics = evaluate(&outcome.model, splits.test)?;
                Ok(NamedReport { name: format!("seed-{seed}"), metrics })
            }
        })
        .collect();
    let reports = run_parallel(jobs, tasks)?;
    Ok(MetricsReport::aggregate(reports))
}

/// The seven-row ablation grid over a base config: text only, then every
/// studied combination of pre-trained vectors (`vec`), the CRF output
/// layer (`crf`), and the audio/video encoders (`av`). Row names describe
/// exactly what is switched on.
pub fn ablation_grid(base: &ModelConfig) -> Vec<(String, ModelConfig)> {
    let rows: [(&str, bool, bool, bool); 7] = [
        ("text", false, false, false),
        ("text+crf", false, true, false),
        ("text+vec", true, false, false),
        ("text+vec+crf", true, true, false),
        ("text+av", false, false, true),
        ("text+crf+av", false, true, true),
        ("text+vec+crf+av", true, true, true),
    ];
    rows.iter()
        .map(|&(name, vec, crf, av)| {
            let mut config = base.clone();
            config.use_pretrained_embeddings = vec;
            config.use_crf = crf;
            config.use_audio = av;
            config.use_video = av;
            (name.to_string(), config)
        })
        .collect()
}
