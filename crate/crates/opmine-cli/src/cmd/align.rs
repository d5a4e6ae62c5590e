//! `opmine align`: match sentences against an SRT subtitle file and write
//! the dataset back with recovered time spans.
//!
//! Sentences carrying a media reference are matched only when it equals the
//! subtitle file's stem (`clip0.srt` covers `media_ref: "clip0"`), so a
//! multi-clip corpus is aligned by chaining one run per clip, each reading
//! the previous run's output. Sentences without a reference always match.

use anyhow::{Context, Result};
use clap::Args;
use std::collections::HashMap;
use std::path::PathBuf;

use opmine::ingest::{write_jsonl, Sentence};
use opmine::subalign::{align, apply_alignments, parse_srt};

use crate::cfgfile::{pick, require, AlignSection};
use crate::common::read_sentences;
use crate::manifest::ManifestBuilder;

#[derive(Debug, Args)]
pub struct AlignArgs {
    /// SubRip subtitle file.
    #[arg(long)]
    srt: Option<PathBuf>,
    /// Sentence dataset (.jsonl or CoNLL).
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Similarity threshold for accepting a chunk window.
    #[arg(long)]
    threshold: Option<f64>,
    /// Maximum subtitle chunks one sentence may span.
    #[arg(long)]
    window: Option<usize>,
    /// Output JSONL path for the span-augmented dataset.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: AlignArgs, file: AlignSection) -> Result<()> {
    let srt = require(args.srt, file.srt, "srt")?;
    let sentences_path = require(args.sentences, file.sentences, "sentences")?;
    let out = require(args.out, file.out, "out")?;
    let threshold = pick(args.threshold, file.threshold, 0.9);
    let window = pick(args.window, file.window, 3);

    let config = serde_json::json!({
        "srt": srt.display().to_string(),
        "sentences": sentences_path.display().to_string(),
        "threshold": threshold,
        "window": window,
    });
    let mut manifest = ManifestBuilder::new("align", config);
    manifest.input(&srt)?;
    manifest.input(&sentences_path)?;

    let sentences = read_sentences(&sentences_path, None)?;
    let stem = srt.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    let in_scope: Vec<Sentence> = sentences
        .iter()
        .filter(|s| s.media_ref.as_deref().is_none_or(|r| r == stem))
        .cloned()
        .collect();
    let other_media = sentences.len() - in_scope.len();

    let chunks = parse_srt(&srt).with_context(|| format!("parsing {}", srt.display()))?;
    let results = align(&in_scope, &chunks, threshold, window);
    let aligned = apply_alignments(&in_scope, &results);

    // splice the aligned subset back into full corpus order
    let by_id: HashMap<&str, &Sentence> = aligned.iter().map(|s| (s.id.as_str(), s)).collect();
    let merged: Vec<Sentence> = sentences
        .iter()
        .map(|s| by_id.get(s.id.as_str()).map_or_else(|| s.clone(), |a| (*a).clone()))
        .collect();

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_jsonl(&out, &merged)?;

    let matched = results.iter().filter(|r| r.matched()).count();
    let mean_similarity =
        results.iter().map(|r| r.best_similarity).sum::<f64>() / results.len().max(1) as f64;
    println!(
        "aligned {matched}/{} sentences against {} subtitle chunks (mean similarity {mean_similarity:.3})",
        results.len(),
        chunks.len()
    );
    if other_media > 0 {
        println!("  {other_media} sentences reference media other than {stem} and passed through");
    }
    for r in results.iter().filter(|r| !r.matched()) {
        println!("  unmatched: {} (best similarity {:.3})", r.sentence_id, r.best_similarity);
    }

    let out_dir = out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(".".as_ref());
    let out_name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.output(&out_name);
    manifest.write(out_dir)?;
    println!("wrote {}", out.display());
    Ok(())
}
