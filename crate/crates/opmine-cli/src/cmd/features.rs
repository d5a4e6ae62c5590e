//! `opmine features`: slice media into per-sentence feature segments and
//! fill the on-disk cache that `train` reads from.

use anyhow::{Context, Result};
use clap::Args;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use opmine::features::{
    cut_to_span, load_video_features, read_wav, spectrogram, FeatureCache, FeatureSequence,
    SpectrogramConfig, DEFAULT_VIDEO_DIM, DEFAULT_VIDEO_FPS,
};
use opmine::ingest::Sentence;

use crate::cfgfile::{pick, pick_opt, require, FeaturesSection};
use crate::common::{audio_cache_key, read_sentences, video_cache_key};
use crate::exit::usage;
use crate::manifest::ManifestBuilder;

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Sentence dataset with media references and aligned time spans.
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Cache directory to write segment files into.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// WAV file, or a directory holding one `<media_ref>.wav` per clip.
    #[arg(long)]
    wav: Option<PathBuf>,
    /// Video feature file, or a directory holding `<media_ref>.vft` files.
    #[arg(long)]
    video_feats: Option<PathBuf>,
    /// Spectrogram window size in samples.
    #[arg(long)]
    window: Option<usize>,
    /// Spectrogram hop size in samples.
    #[arg(long)]
    hop: Option<usize>,
    /// Expected video feature dimension.
    #[arg(long)]
    video_dim: Option<usize>,
}

/// Resolves the media file for one clip: a directory flag means
/// `<dir>/<media_ref><ext>`, a file flag is taken as-is (legal only when
/// the corpus references a single clip).
fn resolve_media(
    flag: &Path,
    media_ref: &str,
    extensions: &[&str],
    n_refs: usize,
    kind: &str,
) -> Result<PathBuf> {
    if flag.is_dir() {
        for ext in extensions {
            let candidate = flag.join(format!("{media_ref}{ext}"));
            if candidate.exists() {
                return Ok(candidate);
            }
        }
        let want = format!("{media_ref}{}", extensions[0]);
        std::fs::metadata(flag.join(&want))
            .with_context(|| format!("no {kind} file {want} under {}", flag.display()))?;
        unreachable!("metadata on a missing file errors");
    }
    if n_refs > 1 {
        return Err(usage(format!(
            "--{kind} points at one file but the corpus references {n_refs} clips; pass a directory"
        )));
    }
    std::fs::metadata(flag).with_context(|| format!("missing {kind} file {}", flag.display()))?;
    Ok(flag.to_path_buf())
}

/// Sentences grouped by clip, keeping only those with both a media
/// reference and an aligned span.
fn by_clip(sentences: &[Sentence]) -> BTreeMap<String, Vec<&Sentence>> {
    let mut clips: BTreeMap<String, Vec<&Sentence>> = BTreeMap::new();
    for s in sentences {
        if let (Some(media_ref), Some(_)) = (&s.media_ref, s.time_span) {
            clips.entry(media_ref.clone()).or_default().push(s);
        }
    }
    clips
}

pub fn run(args: FeaturesArgs, file: FeaturesSection) -> Result<()> {
    let sentences_path = require(args.sentences, file.sentences, "sentences")?;
    let cache_dir = require(args.cache_dir, file.cache_dir, "cache-dir")?;
    let wav = pick_opt(args.wav, file.wav);
    let video_feats = pick_opt(args.video_feats, file.video_feats);
    let window = pick(args.window, file.window, SpectrogramConfig::default().window);
    let hop = pick(args.hop, file.hop, SpectrogramConfig::default().hop);
    let video_dim = pick(args.video_dim, file.video_dim, DEFAULT_VIDEO_DIM);

    if wav.is_none() && video_feats.is_none() {
        return Err(usage("nothing to extract: pass --wav, --video-feats, or both"));
    }
    let spec_config = SpectrogramConfig { window, hop, ..SpectrogramConfig::default() };

    let config = serde_json::json!({
        "sentences": sentences_path.display().to_string(),
        "wav": wav.as_ref().map(|p| p.display().to_string()),
        "video_feats": video_feats.as_ref().map(|p| p.display().to_string()),
        "window": window,
        "hop": hop,
        "video_dim": video_dim,
    });
    let mut manifest = ManifestBuilder::new("features", config);
    manifest.input(&sentences_path)?;

    let sentences = read_sentences(&sentences_path, None)?;
    let clips = by_clip(&sentences);
    if clips.is_empty() {
        return Err(usage(format!(
            "{} has no sentences with both a media reference and a time span; run `opmine align` first",
            sentences_path.display()
        )));
    }
    let skipped = sentences.len() - clips.values().map(Vec::len).sum::<usize>();

    let cache = FeatureCache::new(&cache_dir)?;
    let mut audio_segments = 0usize;
    let mut video_segments = 0usize;

    for (media_ref, members) in &clips {
        if let Some(wav_flag) = &wav {
            let path = resolve_media(wav_flag, media_ref, &[".wav"], clips.len(), "wav")?;
            manifest.input(&path)?;
            let signal = read_wav(&path)?;
            let full = spectrogram(&signal, &spec_config)?;
            let key = audio_cache_key(&spec_config);
            for s in members {
                let (start, end) = s.time_span.expect("grouped sentences carry spans");
                let segment = cut_to_span(&full, start, end);
                let frame_rate = signal.sample_rate_hz as f64 / hop as f64;
                cache.store(media_ref, (start, end), &key, &segment, frame_rate)?;
                audio_segments += 1;
            }
        }
        if let Some(video_flag) = &video_feats {
            let path =
                resolve_media(video_flag, media_ref, &[".vft", ".csv"], clips.len(), "video-feats")?;
            manifest.input(&path)?;
            let full: FeatureSequence = load_video_features(&path, video_dim)?;
            let key = video_cache_key(video_dim);
            for s in members {
                let (start, end) = s.time_span.expect("grouped sentences carry spans");
                let segment = cut_to_span(&full, start, end);
                cache.store(media_ref, (start, end), &key, &segment, DEFAULT_VIDEO_FPS)?;
                video_segments += 1;
            }
        }
    }

    manifest.write(&cache_dir)?;
    println!(
        "cached {audio_segments} audio and {video_segments} video segments for {} clips under {}",
        clips.len(),
        cache_dir.display()
    );
    if skipped > 0 {
        println!("  skipped {skipped} sentences without an aligned media span");
    }
    Ok(())
}
