//! Optional TOML configuration. Every flag has a same-named key in its
//! subcommand's section; a flag given on the command line overrides the
//! file value, and built-in defaults fill whatever remains.

use anyhow::Result;
use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::exit::usage;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub align: AlignSection,
    #[serde(default)]
    pub features: FeaturesSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub ablate: AblateSection,
    #[serde(default)]
    pub synth: SynthSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignSection {
    pub srt: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub window: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesSection {
    pub sentences: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub wav: Option<PathBuf>,
    pub video_feats: Option<PathBuf>,
    pub window: Option<usize>,
    pub hop: Option<usize>,
    pub video_dim: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub sentences: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub setting: Option<String>,
    pub use_audio: Option<bool>,
    pub use_video: Option<bool>,
    pub use_crf: Option<bool>,
    pub embeddings: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub learning_rate: Option<f64>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub jobs: Option<usize>,
    pub window: Option<usize>,
    pub hop: Option<usize>,
    pub video_dim: Option<usize>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub predictions: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblateSection {
    pub sentences: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub setting: Option<String>,
    pub embeddings: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub learning_rate: Option<f64>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub jobs: Option<usize>,
    pub window: Option<usize>,
    pub hop: Option<usize>,
    pub video_dim: Option<usize>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let raw = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&raw)
            .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag value if given, else file value, else the built-in default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag value if given, else file value.
pub fn pick_opt<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Required setting: flag, else file, else a usage error naming the flag.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file).ok_or_else(|| usage(format!("--{name} is required (flag or config file)")))
}

/// Presence-only boolean flags: the flag can switch the value on, the file
/// can set it either way.
pub fn pick_switch(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}
