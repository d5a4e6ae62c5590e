//! Precomputed video descriptor files: a small binary layout (preferred) or
//! a CSV fallback, one frame vector per line.
//!
//! Binary layout: 16-byte header (magic `VFT1`, frame count u32, dim u32,
//! fps×1000 u32, all little-endian) followed by row-major little-endian f32
//! values.

use super::{FeatureSequence, FeaturesError, Modality};
use std::path::Path;

pub const DEFAULT_VIDEO_DIM: usize = 1024;
pub const DEFAULT_VIDEO_FPS: f64 = 25.0;

pub(crate) const MAGIC: &[u8; 4] = b"VFT1";

/// Loads a video feature file (binary or CSV, detected by magic), validates
/// the dimension, and derives per-frame start times from the frame rate.
pub fn load_video_features(
    path: &Path,
    expected_dim: usize,
) -> Result<FeatureSequence, FeaturesError> {
    let display = path.display().to_string();
    let bytes =
        std::fs::read(path).map_err(|source| FeaturesError::Io { path: display.clone(), source })?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes, &display, expected_dim)
    } else {
        read_csv(&bytes, &display, expected_dim)
    }
}

pub(crate) fn read_binary(
    bytes: &[u8],
    display: &str,
    expected_dim: usize,
) -> Result<FeatureSequence, FeaturesError> {
    let format =
        |detail: String| FeaturesError::Format { path: display.to_string(), detail };
    if bytes.len() < 16 {
        return Err(format("truncated header".to_string()));
    }
    let n_frames = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let fps_x1000 = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    if dim != expected_dim {
        return Err(FeaturesError::DimMismatch {
            path: display.to_string(),
            frame: 0,
            expected: expected_dim,
            got: dim,
        });
    }
    if n_frames == 0 {
        return Err(FeaturesError::NoFrames { path: display.to_string() });
    }
    if fps_x1000 == 0 {
        return Err(format("frame rate is zero".to_string()));
    }
    let expected_bytes = 16 + n_frames * dim * 4;
    if bytes.len() < expected_bytes {
        return Err(format(format!(
            "truncated: header promises {expected_bytes} bytes, file has {}",
            bytes.len()
        )));
    }
    let frames: Vec<f64> = bytes[16..expected_bytes]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    let fps = fps_x1000 as f64 / 1000.0;
    Ok(with_times(frames, dim, fps))
}

fn read_csv(
    bytes: &[u8],
    display: &str,
    expected_dim: usize,
) -> Result<FeatureSequence, FeaturesError> {
    let text = std::str::from_utf8(bytes).map_err(|_| FeaturesError::Format {
        path: display.to_string(),
        detail: "not valid UTF-8 (and not the binary layout)".to_string(),
    })?;
    let mut fps = DEFAULT_VIDEO_FPS;
    let mut frames: Vec<f64> = Vec::new();
    let mut n_frames = 0usize;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# fps:") {
            fps = rest.trim().parse().map_err(|_| FeaturesError::Format {
                path: display.to_string(),
                detail: format!("line {}: bad fps value `{}`", line_no + 1, rest.trim()),
            })?;
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| FeaturesError::Format {
                    path: display.to_string(),
                    detail: format!("line {}: unparseable value `{}`", line_no + 1, v.trim()),
                })
            })
            .collect::<Result<_, _>>()?;
        if values.len() != expected_dim {
            return Err(FeaturesError::DimMismatch {
                path: display.to_string(),
                frame: n_frames,
                expected: expected_dim,
                got: values.len(),
            });
        }
        frames.extend(values);
        n_frames += 1;
    }
    if n_frames == 0 {
        return Err(FeaturesError::NoFrames { path: display.to_string() });
    }
    if fps <= 0.0 {
        return Err(FeaturesError::Format {
            path: display.to_string(),
            detail: "frame rate must be positive".to_string(),
        });
    }
    Ok(with_times(frames, expected_dim, fps))
}

fn with_times(frames: Vec<f64>, dim: usize, fps: f64) -> FeatureSequence {
    let n = frames.len() / dim;
    let mut seq = FeatureSequence::new(Modality::Video, dim, frames);
    seq.frame_times_ms = Some((0..n).map(|k| k as f64 * 1000.0 / fps).collect());
    seq
}

/// Serializes frames in the binary layout (f32 precision).
pub(crate) fn to_binary(frames: &[f64], dim: usize, fps: f64) -> Vec<u8> {
    let n_frames = frames.len() / dim;
    let mut bytes = Vec::with_capacity(16 + frames.len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(n_frames as u32).to_le_bytes());
    bytes.extend_from_slice(&(dim as u32).to_le_bytes());
    bytes.extend_from_slice(&((fps * 1000.0).round() as u32).to_le_bytes());
    for &v in frames {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    bytes
}

/// Writes a binary video feature file.
pub fn write_video_features(
    path: &Path,
    frames: &[f64],
    dim: usize,
    fps: f64,
) -> Result<(), FeaturesError> {
    debug_assert!(dim > 0 && frames.len() % dim == 0);
    std::fs::write(path, to_binary(frames, dim, fps))
        .map_err(|source| FeaturesError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_roundtrip_with_frame_times() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vft");
        let frames: Vec<f64> = (0..10 * 4).map(|i| i as f64 * 0.25).collect();
        write_video_features(&path, &frames, 4, 25.0).unwrap();
        let seq = load_video_features(&path, 4).unwrap();
        assert_eq!(seq.n_frames(), 10);
        assert_eq!(seq.frames, frames);
        let times = seq.frame_times_ms.unwrap();
        assert_eq!(times[0], 0.0);
        assert_eq!(times[1], 40.0);
        assert_eq!(times[9], 360.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vft");
        write_video_features(&path, &[0.0; 512], 512, 25.0).unwrap();
        match load_video_features(&path, 1024) {
            Err(FeaturesError::DimMismatch { expected, got, .. }) => {
                assert_eq!(expected, 1024);
                assert_eq!(got, 512);
            }
            other => panic!("expected dim mismatch, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vft");
        write_video_features(&path, &[], 4, 25.0).unwrap();
        assert!(matches!(load_video_features(&path, 4), Err(FeaturesError::NoFrames { .. })));
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vft");
        write_video_features(&path, &[1.0; 8], 4, 25.0).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        let err = load_video_features(&path, 4).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn csv_fallback() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "# fps:10\n1.0, 2.0\n3.0, 4.0\n").unwrap();
        let seq = load_video_features(&path, 2).unwrap();
        assert_eq!(seq.n_frames(), 2);
        assert_eq!(seq.frame(1), &[3.0, 4.0]);
        assert_eq!(seq.frame_times_ms.unwrap(), vec![0.0, 100.0]);
    }

    #[test]
    fn csv_default_fps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "0.5\n").unwrap();
        let seq = load_video_features(&path, 1).unwrap();
        assert_eq!(seq.frame_times_ms.unwrap(), vec![0.0]);
    }

    #[test]
    fn csv_ragged_row_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        assert!(matches!(
            load_video_features(&path, 2),
            Err(FeaturesError::DimMismatch { frame: 1, .. })
        ));
    }

    #[test]
    fn csv_bad_number_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "1.0,oops\n").unwrap();
        assert!(load_video_features(&path, 2).is_err());
    }
}
