//! `opmine eval`: score a `TOKEN GOLD PRED` predictions file and write the
//! metrics report next to a normalized copy of the predictions.

use anyhow::{Context, Result};
use clap::Args;
use std::path::PathBuf;

use opmine::eval::{evaluate_chunk_sentiment, evaluate_chunks};
use opmine::ingest::{read_predictions, write_predictions, Sentence};
use opmine::labels::{decouple, Scheme, TagSequence};

use crate::cfgfile::{require, EvalSection};
use crate::common::{print_report, write_metrics};
use crate::manifest::ManifestBuilder;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions file: TOKEN GOLD PRED lines, blank line between
    /// sentences (the layout CoNLL scorers consume).
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Directory for metrics.json and the normalized predictions copy.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// All-O sequences parse as plain aspect tags; in a corpus that carries
/// sentiments anywhere they must be read as collapsed instead, or the
/// scorer would see two schemes in one file.
fn unify_scheme(seqs: Vec<TagSequence>, collapsed: bool) -> Vec<TagSequence> {
    if !collapsed {
        return seqs;
    }
    seqs.into_iter().map(|t| t.as_collapsed().unwrap_or(t)).collect()
}

fn to_ae(tags: &TagSequence) -> Result<TagSequence> {
    Ok(match tags {
        TagSequence::Collapsed(_) => decouple(tags)?.0,
        other => other.clone(),
    })
}

pub fn run(args: EvalArgs, file: EvalSection) -> Result<()> {
    let predictions_path = require(args.predictions, file.predictions, "predictions")?;
    let out_dir = require(args.out_dir, file.out_dir, "out-dir")?;

    let config = serde_json::json!({
        "predictions": predictions_path.display().to_string(),
    });
    let mut manifest = ManifestBuilder::new("eval", config);
    manifest.input(&predictions_path)?;

    let rows = read_predictions(&predictions_path)
        .with_context(|| format!("loading {}", predictions_path.display()))?;
    let collapsed = rows
        .iter()
        .any(|(_, g, p)| g.scheme() == Scheme::Collapsed || p.scheme() == Scheme::Collapsed);
    let gold = unify_scheme(rows.iter().map(|(_, g, _)| g.clone()).collect(), collapsed);
    let pred = unify_scheme(rows.iter().map(|(_, _, p)| p.clone()).collect(), collapsed);

    let gold_ae: Vec<TagSequence> = gold.iter().map(to_ae).collect::<Result<_>>()?;
    let pred_ae: Vec<TagSequence> = pred.iter().map(to_ae).collect::<Result<_>>()?;
    let mut report = evaluate_chunks(&gold_ae, &pred_ae)?;
    if collapsed {
        report = report.merge(evaluate_chunk_sentiment(&gold, &pred)?);
    }

    std::fs::create_dir_all(&out_dir)?;
    write_metrics(&out_dir, &report)?;

    // normalized copy: same scheme on every line, canonical label spelling
    let normalized: Vec<(Sentence, TagSequence)> = rows
        .iter()
        .zip(gold.iter().zip(&pred))
        .enumerate()
        .map(|(i, ((tokens, _, _), (g, p)))| {
            let mut s = Sentence::from_tokens(format!("s{i}"), tokens);
            s.gold = Some(g.clone());
            (s, p.clone())
        })
        .collect();
    write_predictions(&out_dir.join("predictions.conll"), &normalized)?;

    manifest.output("metrics.json");
    manifest.output("predictions.conll");
    manifest.write(&out_dir)?;

    println!("scored {} sentences from {}", rows.len(), predictions_path.display());
    print_report(&report);
    println!("wrote {}", out_dir.join("metrics.json").display());
    Ok(())
}
