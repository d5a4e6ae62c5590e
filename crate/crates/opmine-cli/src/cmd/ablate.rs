//! `opmine ablate`: cross-validate the seven-row grid (text baseline, then
//! pre-trained vectors / CRF / audio+video in the studied combinations)
//! and test each row against the text baseline with a paired t-test over
//! per-fold F1.

use anyhow::{Context, Result};
use clap::Args;
use std::path::PathBuf;

use opmine::eval::{paired_ttest, Comparison, MetricsReport};
use opmine::features::{SpectrogramConfig, DEFAULT_VIDEO_DIM};
use opmine::model::Setting;
use opmine::train::{ablation_grid, cross_validate, prepare_examples, StackSpec, TrainConfig};

use crate::cfgfile::{pick, pick_opt, require, AblateSection};
use crate::common::{parse_setting, write_metrics, MediaOptions};
use crate::exit::usage;
use crate::manifest::ManifestBuilder;

use super::train::{base_model, load_corpus, register_cache_inputs};

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Training corpus (.jsonl or CoNLL).
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Directory for per-row results and the summary table.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Experimental setting: simple, cal, csl, or jsl.
    #[arg(long)]
    setting: Option<String>,
    /// Pre-trained embedding file; the vector rows of the grid need one.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Feature cache directory; without it the media rows run on the
    /// learned blank frame.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long = "lr")]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Folds per row; the fold assignment is shared so the t-tests pair.
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    hop: Option<usize>,
    #[arg(long)]
    video_dim: Option<usize>,
    /// Dataset format override: conll or jsonl.
    #[arg(long)]
    format: Option<String>,
}

#[derive(serde::Serialize)]
struct SummaryRow {
    name: String,
    ae_f1: f64,
    vs_baseline: opmine::eval::TtestOutcome,
    significant_at_05: bool,
}

pub fn run(args: AblateArgs, file: AblateSection) -> Result<()> {
    let sentences_path = require(args.sentences, file.sentences, "sentences")?;
    let out_dir = require(args.out_dir, file.out_dir, "out-dir")?;
    let setting_name = pick(args.setting, file.setting, "simple".to_string());
    let setting: Setting = parse_setting(&setting_name)?;
    let embeddings_path = require(args.embeddings, file.embeddings, "embeddings")?;
    let cache_dir = pick_opt(args.cache_dir, file.cache_dir);
    let defaults = TrainConfig::default();
    let batch_size = pick(args.batch_size, file.batch_size, defaults.batch_size);
    let epochs = pick(args.epochs, file.epochs, defaults.max_epochs);
    let patience = pick(args.patience, file.patience, defaults.patience);
    let learning_rate = pick(args.learning_rate, file.learning_rate, defaults.learning_rate);
    let seed = pick(args.seed, file.seed, defaults.seed);
    let folds = pick(args.folds, file.folds, 5);
    let jobs = pick(args.jobs, file.jobs, 1);
    let window = pick(args.window, file.window, SpectrogramConfig::default().window);
    let hop = pick(args.hop, file.hop, SpectrogramConfig::default().hop);
    let video_dim = pick(args.video_dim, file.video_dim, DEFAULT_VIDEO_DIM);
    let format = pick_opt(args.format, file.format);

    if folds < 2 {
        return Err(usage("--folds must be at least 2 so the t-tests have pairs"));
    }

    let spectrogram = SpectrogramConfig { window, hop, ..SpectrogramConfig::default() };
    // pull both modalities whenever a cache exists; rows that disable them
    // simply ignore the attached features
    let with_media = cache_dir.is_some();
    let options =
        MediaOptions { use_audio: with_media, use_video: with_media, spectrogram, video_dim };
    let loaded = load_corpus(
        &sentences_path,
        format.as_deref(),
        cache_dir.as_deref(),
        &options,
        Some(&embeddings_path),
        seed,
    )?;
    let table = loaded.table.as_ref().expect("embeddings path was required");
    let base = base_model(setting, false, false, false, &spectrogram, video_dim, Some(table));
    let grid = ablation_grid(&base);
    let spec = StackSpec { vocab_len: loaded.vocab.len(), embeddings: Some(table) };

    let config_json = serde_json::json!({
        "sentences": sentences_path.display().to_string(),
        "format": format,
        "setting": setting_name,
        "embeddings": embeddings_path.display().to_string(),
        "cache_dir": cache_dir.as_ref().map(|p| p.display().to_string()),
        "batch_size": batch_size,
        "epochs": epochs,
        "patience": patience,
        "learning_rate": learning_rate,
        "seed": seed,
        "folds": folds,
        "jobs": jobs,
        "window": window,
        "hop": hop,
        "video_dim": video_dim,
    });
    std::fs::create_dir_all(&out_dir)?;
    let mut manifest = ManifestBuilder::new("ablate", config_json);
    manifest.input(&sentences_path)?;
    manifest.input(&embeddings_path)?;
    register_cache_inputs(&mut manifest, &loaded.sentences, cache_dir.as_deref(), &options)?;

    let mut results: Vec<(String, MetricsReport, Vec<f64>)> = Vec::with_capacity(grid.len());
    for (name, model) in &grid {
        // same seed for every row: identical fold assignment, paired folds
        let row_config = TrainConfig {
            model: model.clone(),
            batch_size,
            max_epochs: epochs,
            patience,
            seed,
            learning_rate,
        };
        let examples = prepare_examples(model, &loaded.corpus, &loaded.vocab)?;
        let report = cross_validate(&row_config, &examples, &spec, folds, jobs)
            .with_context(|| format!("row {name}"))?;
        let values = report.run_values("ae_f1");
        let f1 = report.ae.map(|p| p.f1).unwrap_or(0.0);
        println!("  {name}: AE F1 {f1:.4} over {folds} folds");
        results.push((name.clone(), report, values));
    }

    let baseline_values = results[0].2.clone();
    let baseline_name = results[0].0.clone();
    let mut summary = Vec::with_capacity(results.len());
    for (name, report, values) in &mut results {
        let outcome = paired_ttest(values, &baseline_values)?;
        report.comparisons.push(Comparison {
            baseline: baseline_name.clone(),
            metric: "ae_f1".to_string(),
            outcome,
        });
        let row_dir = out_dir.join("rows").join(name.as_str());
        std::fs::create_dir_all(&row_dir)?;
        write_metrics(&row_dir, report)?;
        manifest.output(&format!("rows/{name}/metrics.json"));
        summary.push(SummaryRow {
            name: name.clone(),
            ae_f1: report.ae.map(|p| p.f1).unwrap_or(0.0),
            vs_baseline: outcome,
            significant_at_05: outcome.significant_at(0.05),
        });
    }

    let summary_path = out_dir.join("ablation.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    manifest.output("ablation.json");
    manifest.write(&out_dir)?;

    println!("\n{:<18} {:>8}  vs {}", "variant", "AE F1", baseline_name);
    for row in &summary {
        let marker = if row.significant_at_05 { " *" } else { "" };
        println!("{:<18} {:>8.4}  {}{marker}", row.name, row.ae_f1, row.vs_baseline);
    }
    println!("\nwrote {}", summary_path.display());
    Ok(())
}
