//! Minimal RIFF/WAVE reader and writer for PCM 16-bit mono files. Container
//! formats and other encodings are out of scope; fixtures are generated in
//! this exact layout.

use super::{AudioSignal, FeaturesError};
use std::path::Path;

const I16_SCALE: f64 = 32768.0;

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

/// Reads a PCM 16-bit mono WAV file; samples are scaled to [-1, 1).
pub fn read_wav(path: &Path) -> Result<AudioSignal, FeaturesError> {
    let display = path.display().to_string();
    let bytes = std::fs::read(path)
        .map_err(|source| FeaturesError::Io { path: display.clone(), source })?;
    let format = |detail: &str| FeaturesError::Format { path: display.clone(), detail: detail.into() };

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(format("not a RIFF/WAVE file"));
    }

    let mut sample_rate: Option<u32> = None;
    let mut data: Option<&[u8]> = None;
    let mut off = 12usize;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32_at(&bytes, off + 4) as usize;
        let body_start = off + 8;
        if body_start + size > bytes.len() {
            return Err(format("truncated chunk"));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(format("fmt chunk too short"));
                }
                let audio_format = u16_at(body, 0);
                let channels = u16_at(body, 2);
                let bits = u16_at(body, 14);
                if audio_format != 1 {
                    return Err(format("only PCM (format 1) is supported"));
                }
                if channels != 1 {
                    return Err(format("only mono audio is supported"));
                }
                if bits != 16 {
                    return Err(format("only 16-bit samples are supported"));
                }
                sample_rate = Some(u32_at(body, 4));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunk bodies are word-aligned: odd sizes carry a pad byte
        off = body_start + size + (size % 2);
    }

    let sample_rate = sample_rate.ok_or_else(|| format("missing fmt chunk"))?;
    if sample_rate == 0 {
        return Err(format("sample rate is zero"));
    }
    let data = data.ok_or_else(|| format("missing data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(format("data chunk has odd byte length"));
    }
    let samples = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / I16_SCALE)
        .collect();
    Ok(AudioSignal { samples, sample_rate_hz: sample_rate })
}

/// Writes samples (clamped to [-1, 1]) as PCM 16-bit mono.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate_hz: u32) -> Result<(), FeaturesError> {
    let display = path.display().to_string();
    let data_len = samples.len() * 2;
    let mut bytes = Vec::with_capacity(44 + data_len);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&sample_rate_hz.to_le_bytes());
    bytes.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes()); // byte rate
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * I16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64);
        bytes.extend_from_slice(&(v as i16).to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|source| FeaturesError::Io { path: display, source })
}
