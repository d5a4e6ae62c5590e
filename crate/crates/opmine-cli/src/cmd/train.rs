//! `opmine train`: fit the sequence labeler on a prepared corpus. One
//! invocation runs a single seeded train/valid/test split, a multi-seed
//! repetition of that split, or k-fold cross-validation.

use anyhow::{Context, Result};
use clap::Args;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

use opmine::features::{FeatureCache, SpectrogramConfig, DEFAULT_VIDEO_DIM};
use opmine::ingest::{load_embeddings, write_predictions, EmbeddingTable, Sentence, Vocabulary};
use opmine::model::{ModelConfig, Setting};
use opmine::train::{
    cross_validate, evaluate, init_stack, multi_seed, predict, prepare_examples, train as fit,
    Splits, StackSpec, TrainConfig, TrainError, TrainExample,
};

use crate::cfgfile::{pick, pick_opt, pick_switch, require, TrainSection};
use crate::common::{
    attach_cached_media, audio_cache_key, print_report, read_sentences, video_cache_key,
    write_metrics, MediaOptions,
};
use crate::exit::usage;
use crate::manifest::ManifestBuilder;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training corpus (.jsonl or CoNLL).
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Run directory for checkpoint, metrics, and manifest.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Experimental setting: simple, cal, csl, or jsl.
    #[arg(long)]
    setting: Option<String>,
    /// Feed cached audio spectrogram segments into the encoder.
    #[arg(long)]
    use_audio: bool,
    /// Feed cached video feature segments into the encoder.
    #[arg(long)]
    use_video: bool,
    /// Decode with the structured transition layer instead of per-token
    /// argmax.
    #[arg(long)]
    use_crf: bool,
    /// Pre-trained embedding file (token then values per line).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Feature cache directory written by `opmine features`.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Upper bound on training epochs (early stopping may use fewer).
    #[arg(long)]
    epochs: Option<usize>,
    /// Epochs without validation improvement before stopping.
    #[arg(long)]
    patience: Option<usize>,
    /// Adam learning rate.
    #[arg(long = "lr")]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run k-fold cross-validation instead of a single split.
    #[arg(long)]
    folds: Option<usize>,
    /// Comma-separated seeds: one full run per seed on a fixed split.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads for folds or seeds.
    #[arg(long)]
    jobs: Option<usize>,
    /// Spectrogram window (must match the `features` run).
    #[arg(long)]
    window: Option<usize>,
    /// Spectrogram hop (must match the `features` run).
    #[arg(long)]
    hop: Option<usize>,
    /// Video feature dimension (must match the `features` run).
    #[arg(long)]
    video_dim: Option<usize>,
    /// Dataset format override: conll or jsonl.
    #[arg(long)]
    format: Option<String>,
}

/// Stream tag for the rows of the embedding table that the file does not
/// cover; keeps their init independent of the training stream.
const EMBED_INIT_STREAM: u64 = 0x656D_6265_6464;
/// Stream tag for carving the train/valid/test split.
const SPLIT_STREAM: u64 = 0x7370_6C69_7473;

/// The corpus with everything derived from it that a run needs.
pub struct LoadedCorpus {
    pub sentences: Vec<Sentence>,
    pub corpus: Vec<opmine::train::CorpusSentence>,
    pub vocab: Vocabulary,
    pub table: Option<EmbeddingTable>,
}

pub fn load_corpus(
    sentences_path: &Path,
    format: Option<&str>,
    cache_dir: Option<&Path>,
    options: &MediaOptions,
    embeddings_path: Option<&Path>,
    seed: u64,
) -> Result<LoadedCorpus> {
    let sentences = read_sentences(sentences_path, format)?;
    let cache = match cache_dir {
        Some(dir) => Some(FeatureCache::new(dir)?),
        None => None,
    };
    let corpus = attach_cached_media(&sentences, cache.as_ref(), options)?;
    let vocab = Vocabulary::build(&sentences, 1)?;
    let table = match embeddings_path {
        Some(path) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ EMBED_INIT_STREAM);
            let (table, coverage) = load_embeddings(path, &vocab, &mut rng)?;
            println!(
                "embeddings: {}/{} vocabulary entries covered by {}",
                coverage.found,
                coverage.total(),
                path.display()
            );
            Some(table)
        }
        None => None,
    };
    Ok(LoadedCorpus { sentences, corpus, vocab, table })
}

/// Architecture for a run: paper-shape defaults with the ablation switches
/// and input dimensions filled in. A pre-trained table fixes the embedding
/// width.
pub fn base_model(
    setting: Setting,
    use_audio: bool,
    use_video: bool,
    use_crf: bool,
    spectrogram: &SpectrogramConfig,
    video_dim: usize,
    table: Option<&EmbeddingTable>,
) -> ModelConfig {
    let mut model = ModelConfig {
        setting,
        use_audio,
        use_video,
        use_crf,
        use_pretrained_embeddings: table.is_some(),
        audio_input_dim: spectrogram.dim(),
        video_input_dim: video_dim,
        ..ModelConfig::default()
    };
    if let Some(table) = table {
        model.embedding_dim = table.dimension;
    }
    model
}

/// Registers every cache segment the run will read, so the manifest hash
/// covers the actual feature bytes.
pub fn register_cache_inputs(
    manifest: &mut ManifestBuilder,
    sentences: &[Sentence],
    cache_dir: Option<&Path>,
    options: &MediaOptions,
) -> Result<()> {
    let Some(dir) = cache_dir else { return Ok(()) };
    if !options.any() {
        return Ok(());
    }
    let cache = FeatureCache::new(dir)?;
    for s in sentences {
        if let (Some(media_ref), Some(span)) = (s.media_ref.as_deref(), s.time_span) {
            if options.use_audio {
                manifest.input(&cache.path_for(media_ref, span, &audio_cache_key(&options.spectrogram)))?;
            }
            if options.use_video {
                manifest.input(&cache.path_for(media_ref, span, &video_cache_key(options.video_dim)))?;
            }
        }
    }
    Ok(())
}

/// Seeded 80/10/10 split (test and validation get at least one sentence
/// each). The assignment depends only on the seed and the corpus size.
pub fn split_examples(
    examples: &[TrainExample],
    seed: u64,
) -> Result<(Vec<TrainExample>, Vec<TrainExample>, Vec<TrainExample>)> {
    let n = examples.len();
    if n < 3 {
        return Err(usage(format!(
            "need at least 3 usable sentences to carve train/valid/test splits, found {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ SPLIT_STREAM);
    order.shuffle(&mut rng);
    let n_test = (n / 10).max(1);
    let n_valid = (n / 10).max(1);
    let take = |idx: &[usize]| -> Vec<TrainExample> {
        idx.iter().map(|&i| examples[i].clone()).collect()
    };
    let test = take(&order[..n_test]);
    let valid = take(&order[n_test..n_test + n_valid]);
    let train = take(&order[n_test + n_valid..]);
    Ok((train, valid, test))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn run(args: TrainArgs, file: TrainSection) -> Result<()> {
    let sentences_path = require(args.sentences, file.sentences, "sentences")?;
    let out_dir = require(args.out_dir, file.out_dir, "out-dir")?;
    let setting_name = pick(args.setting, file.setting, "simple".to_string());
    let setting = crate::common::parse_setting(&setting_name)?;
    let use_audio = pick_switch(args.use_audio, file.use_audio);
    let use_video = pick_switch(args.use_video, file.use_video);
    let use_crf = pick_switch(args.use_crf, file.use_crf);
    let embeddings_path = pick_opt(args.embeddings, file.embeddings);
    let cache_dir = pick_opt(args.cache_dir, file.cache_dir);
    let defaults = TrainConfig::default();
    let batch_size = pick(args.batch_size, file.batch_size, defaults.batch_size);
    let epochs = pick(args.epochs, file.epochs, defaults.max_epochs);
    let patience = pick(args.patience, file.patience, defaults.patience);
    let learning_rate = pick(args.learning_rate, file.learning_rate, defaults.learning_rate);
    let seed = pick(args.seed, file.seed, defaults.seed);
    let folds = pick_opt(args.folds, file.folds);
    let seeds = pick_opt(args.seeds, file.seeds);
    let jobs = pick(args.jobs, file.jobs, 1);
    let window = pick(args.window, file.window, SpectrogramConfig::default().window);
    let hop = pick(args.hop, file.hop, SpectrogramConfig::default().hop);
    let video_dim = pick(args.video_dim, file.video_dim, DEFAULT_VIDEO_DIM);
    let format = pick_opt(args.format, file.format);

    if folds.is_some() && seeds.is_some() {
        return Err(usage("--folds and --seeds are mutually exclusive"));
    }
    if (use_audio || use_video) && cache_dir.is_none() {
        return Err(usage(
            "media encoders read cached features: pass --cache-dir (and run `opmine features` first)",
        ));
    }

    let spectrogram = SpectrogramConfig { window, hop, ..SpectrogramConfig::default() };
    let options = MediaOptions { use_audio, use_video, spectrogram, video_dim };
    let loaded = load_corpus(
        &sentences_path,
        format.as_deref(),
        cache_dir.as_deref(),
        &options,
        embeddings_path.as_deref(),
        seed,
    )?;
    let model =
        base_model(setting, use_audio, use_video, use_crf, &spectrogram, video_dim, loaded.table.as_ref());
    let train_config = TrainConfig {
        model: model.clone(),
        batch_size,
        max_epochs: epochs,
        patience,
        seed,
        learning_rate,
    };
    train_config.validate()?;

    let examples = prepare_examples(&model, &loaded.corpus, &loaded.vocab)?;
    if examples.is_empty() {
        return Err(anyhow::Error::new(TrainError::EmptyDataset { what: "training" }).context(
            format!(
                "no usable sentences: {} keeps only sentences whose gold tags agree on one \
                 sentiment, which needs collapsed tags (`B-POS` style) in the data",
                model.setting
            ),
        ));
    }
    println!(
        "{} usable sentences, vocabulary of {} tokens, setting {}",
        examples.len(),
        loaded.vocab.len(),
        model.setting
    );
    let spec = StackSpec { vocab_len: loaded.vocab.len(), embeddings: loaded.table.as_ref() };

    // no output locations in the snapshot: the content hash identifies the
    // computation, so rerunning into a different directory hashes the same
    let config_json = serde_json::json!({
        "sentences": sentences_path.display().to_string(),
        "format": format,
        "embeddings": embeddings_path.as_ref().map(|p| p.display().to_string()),
        "cache_dir": cache_dir.as_ref().map(|p| p.display().to_string()),
        "train": train_config,
        "folds": folds,
        "seeds": seeds,
        "jobs": jobs,
        "window": window,
        "hop": hop,
        "video_dim": video_dim,
    });
    std::fs::create_dir_all(&out_dir)?;
    let mut manifest = ManifestBuilder::new("train", config_json.clone());
    manifest.input(&sentences_path)?;
    if let Some(p) = &embeddings_path {
        manifest.input(p)?;
    }
    register_cache_inputs(&mut manifest, &loaded.sentences, cache_dir.as_deref(), &options)?;
    write_json(&out_dir.join("config.json"), &config_json)?;
    manifest.output("config.json");

    match (folds, &seeds) {
        (Some(k), None) => {
            let report = cross_validate(&train_config, &examples, &spec, k, jobs)?;
            for run in &report.runs {
                let f1 = run.metrics.ae.map(|p| p.f1).unwrap_or(0.0);
                println!("  {}: AE F1 {:.4}", run.name, f1);
            }
            println!("cross-validation mean over {k} folds:");
            print_report(&report);
            write_metrics(&out_dir, &report)?;
            manifest.output("metrics.json");
        }
        (None, Some(list)) => {
            let (train_set, valid_set, test_set) = split_examples(&examples, seed)?;
            let splits = Splits { train: &train_set, valid: &valid_set, test: &test_set };
            let report = multi_seed(&train_config, &splits, list, &spec, jobs)?;
            for run in &report.runs {
                let f1 = run.metrics.ae.map(|p| p.f1).unwrap_or(0.0);
                println!("  {}: AE F1 {:.4}", run.name, f1);
            }
            println!("mean over {} seeds:", list.len());
            print_report(&report);
            write_metrics(&out_dir, &report)?;
            manifest.output("metrics.json");
        }
        (None, None) => {
            let (train_set, valid_set, test_set) = split_examples(&examples, seed)?;
            println!(
                "split: {} train / {} valid / {} test",
                train_set.len(),
                valid_set.len(),
                test_set.len()
            );
            let stack = init_stack(&model, seed, &spec)?;
            let outcome = fit(&train_config, stack, &train_set, &valid_set)?;
            println!(
                "trained {} epochs; best validation AE F1 {:.4} at epoch {}",
                outcome.history.len(),
                outcome.best_valid_f1,
                outcome.best_epoch
            );
            let report = evaluate(&outcome.model, &test_set)?;
            println!("test set:");
            print_report(&report);

            outcome.model.save(&out_dir.join("checkpoint.bin"))?;
            manifest.output("checkpoint.bin");
            write_json(&out_dir.join("history.json"), &outcome.history)?;
            manifest.output("history.json");
            write_metrics(&out_dir, &report)?;
            manifest.output("metrics.json");

            let predictions = predict(&outcome.model, &test_set)?;
            let tag_vocab = outcome.model.tag_vocab();
            let by_id: HashMap<&str, &Sentence> =
                loaded.sentences.iter().map(|s| (s.id.as_str(), s)).collect();
            let mut rows = Vec::with_capacity(test_set.len());
            for (ex, pred) in test_set.iter().zip(&predictions.tags) {
                let src = by_id.get(ex.id.as_str()).expect("examples come from the corpus");
                let mut s = (*src).clone();
                // the gold column mirrors the model's training targets, so
                // both columns share one scheme
                s.gold = Some(tag_vocab.decode(&ex.gold)?);
                rows.push((s, pred.clone()));
            }
            write_predictions(&out_dir.join("predictions.conll"), &rows)?;
            manifest.output("predictions.conll");
        }
        (Some(_), Some(_)) => unreachable!("rejected above"),
    }

    manifest.write(&out_dir)?;
    println!("wrote run artifacts to {}", out_dir.display());
    Ok(())
}
