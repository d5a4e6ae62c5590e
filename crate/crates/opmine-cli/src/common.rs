//! Helpers shared by the subcommands: dataset loading, cached-feature
//! attachment, metrics serialization, and table printing.

use anyhow::{Context, Result};
use std::path::Path;

use opmine::eval::MetricsReport;
use opmine::features::{FeatureCache, Modality, SpectrogramConfig};
use opmine::ingest::{load_dataset, DatasetFormat, Sentence};
use opmine::model::Setting;
use opmine::train::CorpusSentence;

use crate::exit::usage;

pub fn parse_setting(name: &str) -> Result<Setting> {
    match name {
        "simple" => Ok(Setting::Simple),
        "cal" => Ok(Setting::Cal),
        "csl" => Ok(Setting::Csl),
        "jsl" => Ok(Setting::Jsl),
        other => Err(usage(format!(
            "unknown setting `{other}` (expected simple, cal, csl, or jsl)"
        ))),
    }
}

/// Dataset format from an explicit name, else from the file extension
/// (`.jsonl` is JSONL, anything else CoNLL).
pub fn detect_format(path: &Path, explicit: Option<&str>) -> Result<DatasetFormat> {
    if let Some(name) = explicit {
        return name.parse().map_err(usage);
    }
    Ok(match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => DatasetFormat::Jsonl,
        _ => DatasetFormat::Conll,
    })
}

pub fn read_sentences(path: &Path, explicit_format: Option<&str>) -> Result<Vec<Sentence>> {
    let format = detect_format(path, explicit_format)?;
    let sentences =
        load_dataset(path, format).with_context(|| format!("loading {}", path.display()))?;
    if sentences.is_empty() {
        return Err(usage(format!("{} contains no sentences", path.display())));
    }
    Ok(sentences)
}

/// Cache keys must match between `features` (which writes segments) and
/// `train` (which reads them back).
pub fn audio_cache_key(config: &SpectrogramConfig) -> String {
    config.cache_key()
}

pub fn video_cache_key(dim: usize) -> String {
    format!("video:dim={dim}")
}

pub struct MediaOptions {
    pub use_audio: bool,
    pub use_video: bool,
    pub spectrogram: SpectrogramConfig,
    pub video_dim: usize,
}

impl MediaOptions {
    pub fn any(&self) -> bool {
        self.use_audio || self.use_video
    }
}

/// Missing cache entries are data-shaped failures: the flags were fine, the
/// `features` step just has not produced this segment yet.
fn missing_segment(kind: &str, id: &str, media_ref: &str, span: (u64, u64)) -> anyhow::Error {
    anyhow::Error::new(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!(
            "no cached {kind} features for sentence {id} ({media_ref} {span:?}); \
             run `opmine features` first"
        ),
    ))
}

/// Wraps sentences with their cached media features. Sentences without a
/// media reference or time span stay feature-free (the encoder's learned
/// blank frame covers them); an aligned sentence whose segment is missing
/// from the cache is an error pointing at the `features` step.
pub fn attach_cached_media(
    sentences: &[Sentence],
    cache: Option<&FeatureCache>,
    options: &MediaOptions,
) -> Result<Vec<CorpusSentence>> {
    let mut out = Vec::with_capacity(sentences.len());
    for s in sentences {
        let mut cs = CorpusSentence::text_only(s.clone());
        if let (Some(cache), Some(media_ref), Some(span)) =
            (cache, s.media_ref.as_deref(), s.time_span)
        {
            if options.use_audio {
                let key = audio_cache_key(&options.spectrogram);
                let seq = cache
                    .load(media_ref, span, &key, options.spectrogram.dim())
                    .with_context(|| format!("reading cached audio for {}", s.id))?;
                let mut seq =
                    seq.ok_or_else(|| missing_segment("audio", &s.id, media_ref, span))?;
                seq.modality = Modality::Audio;
                cs.audio = Some(seq);
            }
            if options.use_video {
                let key = video_cache_key(options.video_dim);
                let seq = cache
                    .load(media_ref, span, &key, options.video_dim)
                    .with_context(|| format!("reading cached video for {}", s.id))?;
                let seq =
                    seq.ok_or_else(|| missing_segment("video", &s.id, media_ref, span))?;
                cs.video = Some(seq);
            }
        }
        out.push(cs);
    }
    Ok(out)
}

/// MetricsReport JSON with a flattened `ae_f1` convenience field.
pub fn metrics_json(report: &MetricsReport) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let (Some(ae), Some(map)) = (&report.ae, value.as_object_mut()) {
        map.insert("ae_f1".to_string(), serde_json::json!(ae.f1));
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

pub fn write_metrics(dir: &Path, report: &MetricsReport) -> Result<()> {
    let path = dir.join("metrics.json");
    std::fs::write(&path, metrics_json(report)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn print_report(report: &MetricsReport) {
    if let Some(ae) = &report.ae {
        println!(
            "aspect extraction   P {:.4}  R {:.4}  F1 {:.4}",
            ae.precision, ae.recall, ae.f1
        );
    }
    for class in &report.classes {
        println!(
            "  {:<9} P {:.4}  R {:.4}  F1 {:.4}  (gold {}, predicted {})",
            class.class.name(),
            class.score.precision,
            class.score.recall,
            class.score.f1,
            class.gold_support,
            class.pred_support
        );
    }
    if let Some(macro_avg) = &report.macro_avg {
        println!(
            "macro average       P {:.4}  R {:.4}  F1 {:.4}",
            macro_avg.precision, macro_avg.recall, macro_avg.f1
        );
    }
    if let Some(acc) = report.sentence_accuracy {
        println!("sentence accuracy   {acc:.4}");
    }
}
