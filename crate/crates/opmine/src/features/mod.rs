//! Per-sentence media features: FFT spectrograms computed from WAV audio and
//! precomputed video descriptors read from feature files, both cut to each
//! sentence's time span.

mod cache;
mod spectrogram;
mod video;
mod wav;

pub use cache::FeatureCache;
pub use spectrogram::{spectrogram, SpectrogramConfig};
pub use video::{load_video_features, write_video_features, DEFAULT_VIDEO_DIM, DEFAULT_VIDEO_FPS};
pub use wav::{read_wav, write_wav};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeaturesError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Format { path: String, detail: String },
    #[error("signal has {len} samples, shorter than one window ({window}); zero-pad the signal to at least one window if partial frames are wanted")]
    ShortSignal { len: usize, window: usize },
    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },
    #[error("{path}: frame {frame} has dimension {got}, expected {expected}")]
    DimMismatch { path: String, frame: usize, expected: usize, got: usize },
    #[error("{path}: no frames")]
    NoFrames { path: String },
}

/// Raw mono audio: samples in [-1, 1] at a known rate. The rate is carried
/// as data, never assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        debug_assert!(sample_rate_hz > 0);
        AudioSignal { samples, sample_rate_hz }
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate_hz as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Audio,
    Video,
}

/// A time-ordered sequence of fixed-width feature vectors for one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    pub modality: Modality,
    pub dim: usize,
    /// Row-major: `frames.len() == n_frames * dim`.
    pub frames: Vec<f64>,
    /// Per-frame start timestamps in ms, when known.
    pub frame_times_ms: Option<Vec<f64>>,
}

impl FeatureSequence {
    pub fn new(modality: Modality, dim: usize, frames: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && frames.len() % dim == 0);
        FeatureSequence { modality, dim, frames, frame_times_ms: None }
    }

    pub fn n_frames(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.frames.len() / self.dim
        }
    }

    pub fn frame(&self, k: usize) -> &[f64] {
        &self.frames[k * self.dim..(k + 1) * self.dim]
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Retains the frames whose timestamp lies in `[start_ms, end_ms)`. The
/// result is a contiguous subsequence; empty output signals a sentence with
/// no overlapping media. Sequences without timestamps pass through whole.
pub fn cut_to_span(seq: &FeatureSequence, start_ms: u64, end_ms: u64) -> FeatureSequence {
    debug_assert!(start_ms < end_ms);
    let Some(times) = &seq.frame_times_ms else {
        return seq.clone();
    };
    let start = start_ms as f64;
    let end = end_ms as f64;
    let keep: Vec<usize> =
        (0..seq.n_frames()).filter(|&k| times[k] >= start && times[k] < end).collect();
    let mut frames = Vec::with_capacity(keep.len() * seq.dim);
    let mut out_times = Vec::with_capacity(keep.len());
    for &k in &keep {
        frames.extend_from_slice(seq.frame(k));
        out_times.push(times[k]);
    }
    FeatureSequence {
        modality: seq.modality,
        dim: seq.dim,
        frames,
        frame_times_ms: Some(out_times),
    }
}

/// Uniform-stride subsampling down to at most `max_frames`, keeping the
/// first and last frames (identity when already short enough; `max_frames`
/// of 1 keeps the first frame).
pub fn downsample(seq: &FeatureSequence, max_frames: usize) -> FeatureSequence {
    debug_assert!(max_frames >= 1);
    let n = seq.n_frames();
    if n <= max_frames {
        return seq.clone();
    }
    let picks: Vec<usize> = if max_frames == 1 {
        vec![0]
    } else {
        (0..max_frames)
            .map(|j| (j as f64 * (n - 1) as f64 / (max_frames - 1) as f64).round() as usize)
            .collect()
    };
    let mut frames = Vec::with_capacity(picks.len() * seq.dim);
    let mut times = seq.frame_times_ms.as_ref().map(|_| Vec::with_capacity(picks.len()));
    for &k in &picks {
        frames.extend_from_slice(seq.frame(k));
        if let (Some(ts), Some(src)) = (&mut times, &seq.frame_times_ms) {
            ts.push(src[k]);
        }
    }
    FeatureSequence { modality: seq.modality, dim: seq.dim, frames, frame_times_ms: times }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_with_times(times: &[f64]) -> FeatureSequence {
        let mut s = FeatureSequence::new(
            Modality::Video,
            2,
            times.iter().flat_map(|&t| [t, -t]).collect(),
        );
        s.frame_times_ms = Some(times.to_vec());
        s
    }

    #[test]
    fn cut_half_open_interval() {
        let s = seq_with_times(&[0.0, 40.0, 80.0]);
        let cut = cut_to_span(&s, 35, 85);
        assert_eq!(cut.n_frames(), 2);
        assert_eq!(cut.frame_times_ms.as_ref().unwrap(), &[40.0, 80.0]);
        assert_eq!(cut.frame(0), &[40.0, -40.0]);
    }

    #[test]
    fn cut_all_is_identity() {
        let s = seq_with_times(&[0.0, 40.0, 80.0]);
        assert_eq!(cut_to_span(&s, 0, 100), s);
    }

    #[test]
    fn cut_before_all_is_empty() {
        let s = seq_with_times(&[100.0, 140.0]);
        let cut = cut_to_span(&s, 0, 50);
        assert!(cut.is_empty());
        assert_eq!(cut.dim, 2);
    }

    #[test]
    fn cut_excludes_end() {
        let s = seq_with_times(&[0.0, 40.0]);
        let cut = cut_to_span(&s, 0, 40);
        assert_eq!(cut.n_frames(), 1);
    }

    #[test]
    fn cut_is_contiguous() {
        let s = seq_with_times(&[0.0, 10.0, 20.0, 30.0, 40.0]);
        let cut = cut_to_span(&s, 10, 35);
        let times = cut.frame_times_ms.unwrap();
        assert_eq!(times, vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn downsample_identity_when_short() {
        let s = seq_with_times(&[0.0, 1.0, 2.0]);
        assert_eq!(downsample(&s, 3), s);
        assert_eq!(downsample(&s, 10), s);
    }

    #[test]
    fn downsample_keeps_endpoints() {
        let times: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let s = seq_with_times(&times);
        let d = downsample(&s, 4);
        assert_eq!(d.n_frames(), 4);
        let t = d.frame_times_ms.unwrap();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[3], 9.0);
    }

    #[test]
    fn downsample_to_one_keeps_first() {
        let s = seq_with_times(&[5.0, 6.0, 7.0]);
        let d = downsample(&s, 1);
        assert_eq!(d.n_frames(), 1);
        assert_eq!(d.frame_times_ms.unwrap(), vec![5.0]);
    }

    #[test]
    fn frame_accessors() {
        let s = FeatureSequence::new(Modality::Audio, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(s.n_frames(), 2);
        assert_eq!(s.frame(1), &[4.0, 5.0, 6.0]);
    }
}
