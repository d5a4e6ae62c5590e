//! On-disk feature cache: one file per (media_ref, span, extraction-params)
//! triple, in the binary video-feature layout. Writers of identical content
//! may race freely (last writer wins with the same bytes).

use super::{video, FeatureSequence, FeaturesError};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub struct FeatureCache {
    dir: PathBuf,
}

impl FeatureCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, FeaturesError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)
            .map_err(|source| FeaturesError::Io { path: dir.display().to_string(), source })?;
        Ok(FeatureCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Deterministic cache file path for a segment. `params_key` must encode
    /// every extraction parameter that affects the content.
    pub fn path_for(&self, media_ref: &str, span: (u64, u64), params_key: &str) -> PathBuf {
        let mut hasher = Sha256::new();
        hasher.update(media_ref.as_bytes());
        hasher.update([0]);
        hasher.update(span.0.to_le_bytes());
        hasher.update(span.1.to_le_bytes());
        hasher.update([0]);
        hasher.update(params_key.as_bytes());
        let digest = hasher.finalize();
        let hash_hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        let safe_ref: String = media_ref
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.join(format!("{safe_ref}_{}_{}_{}.vft", span.0, span.1, hash_hex))
    }

    /// Stores a (possibly empty) segment. Frame values are stored at f32
    /// precision per the file layout.
    pub fn store(
        &self,
        media_ref: &str,
        span: (u64, u64),
        params_key: &str,
        seq: &FeatureSequence,
        fps: f64,
    ) -> Result<PathBuf, FeaturesError> {
        let path = self.path_for(media_ref, span, params_key);
        let bytes = video::to_binary(&seq.frames, seq.dim, fps);
        std::fs::write(&path, bytes)
            .map_err(|source| FeaturesError::Io { path: path.display().to_string(), source })?;
        Ok(path)
    }

    /// Loads a cached segment if present. Empty segments (zero frames) come
    /// back as `Some` empty sequences, unlike the strict feature-file loader.
    pub fn load(
        &self,
        media_ref: &str,
        span: (u64, u64),
        params_key: &str,
        dim: usize,
    ) -> Result<Option<FeatureSequence>, FeaturesError> {
        let path = self.path_for(media_ref, span, params_key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => {
                return Err(FeaturesError::Io { path: path.display().to_string(), source })
            }
        };
        let display = path.display().to_string();
        match video::read_binary(&bytes, &display, dim) {
            Ok(seq) => Ok(Some(seq)),
            Err(FeaturesError::NoFrames { .. }) => Ok(Some(FeatureSequence {
                modality: super::Modality::Video,
                dim,
                frames: Vec::new(),
                frame_times_ms: Some(Vec::new()),
            })),
            Err(e) => Err(e),
        }
    }
}
