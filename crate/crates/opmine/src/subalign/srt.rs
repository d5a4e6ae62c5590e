//! SubRip (.srt) parsing and emission.
//!
//! Grammar per block: counter line, `HH:MM:SS,mmm --> HH:MM:SS,mmm` time
//! line, one or more text lines, and a blank line terminating the block.

use super::SubtitleChunk;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SrtError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line} (chunk {counter}): {detail}")]
    Malformed { line: usize, counter: u64, detail: String },
}

pub fn parse_srt(path: &Path) -> Result<Vec<SubtitleChunk>, SrtError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|source| SrtError::Io { path: path.display().to_string(), source })?;
    parse_srt_str(&raw)
}

/// Parses SubRip text. A UTF-8 BOM is tolerated; chunks come back in file
/// order.
pub fn parse_srt_str(raw: &str) -> Result<Vec<SubtitleChunk>, SrtError> {
    let raw = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    let lines: Vec<&str> = raw.lines().collect();
    let mut chunks = Vec::new();
    let mut i = 0usize;

    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let counter_line = i;
        let counter: u64 = lines[i].trim().parse().map_err(|_| SrtError::Malformed {
            line: counter_line + 1,
            counter: chunks.len() as u64 + 1,
            detail: format!("expected numeric counter, got `{}`", lines[i].trim()),
        })?;
        i += 1;
        let Some(time_line) = lines.get(i) else {
            return Err(SrtError::Malformed {
                line: counter_line + 2,
                counter,
                detail: "missing time line".to_string(),
            });
        };
        let (start_ms, end_ms) = parse_time_line(time_line, i + 1, counter)?;
        i += 1;

        let mut text_lines: Vec<&str> = Vec::new();
        while i < lines.len() && !lines[i].trim().is_empty() {
            text_lines.push(lines[i].trim());
            i += 1;
        }
        if text_lines.is_empty() {
            return Err(SrtError::Malformed {
                line: i + 1,
                counter,
                detail: "chunk has no text lines".to_string(),
            });
        }
        if start_ms >= end_ms {
            return Err(SrtError::Malformed {
                line: counter_line + 2,
                counter,
                detail: format!("start time {start_ms}ms is not before end time {end_ms}ms"),
            });
        }
        chunks.push(SubtitleChunk { counter, start_ms, end_ms, text: text_lines.join(" ") });
    }
    Ok(chunks)
}

fn parse_time_line(line: &str, line_no: usize, counter: u64) -> Result<(u64, u64), SrtError> {
    let malformed = |detail: String| SrtError::Malformed { line: line_no, counter, detail };
    let Some((start, end)) = line.split_once("-->") else {
        return Err(malformed(format!("missing `-->` separator in `{line}`")));
    };
    Ok((
        parse_timestamp(start.trim()).map_err(|d| malformed(d))?,
        parse_timestamp(end.trim()).map_err(|d| malformed(d))?,
    ))
}

/// `HH:MM:SS,mmm` to milliseconds.
fn parse_timestamp(s: &str) -> Result<u64, String> {
    let bad = || format!("malformed timestamp `{s}` (expected HH:MM:SS,mmm)");
    let (hms, millis) = s.split_once(',').ok_or_else(bad)?;
    let parts: Vec<&str> = hms.split(':').collect();
    if parts.len() != 3 || millis.len() != 3 {
        return Err(bad());
    }
    let h: u64 = parts[0].parse().map_err(|_| bad())?;
    let m: u64 = parts[1].parse().map_err(|_| bad())?;
    let sec: u64 = parts[2].parse().map_err(|_| bad())?;
    let ms: u64 = millis.parse().map_err(|_| bad())?;
    if m >= 60 || sec >= 60 {
        return Err(bad());
    }
    Ok(((h * 60 + m) * 60 + sec) * 1000 + ms)
}

fn format_timestamp(ms: u64) -> String {
    let h = ms / 3_600_000;
    let m = (ms % 3_600_000) / 60_000;
    let s = (ms % 60_000) / 1000;
    let milli = ms % 1000;
    format!("{h:02}:{m:02}:{s:02},{milli:03}")
}

/// Renders chunks back to SubRip text. Since parsed chunks hold their text
/// joined into one line, emission writes one text line per chunk; parsing
/// the output reproduces the chunks exactly.
pub fn emit_srt(chunks: &[SubtitleChunk]) -> String {
    let mut out = String::new();
    for c in chunks {
        out.push_str(&format!(
            "{}\n{} --> {}\n{}\n\n",
            c.counter,
            format_timestamp(c.start_ms),
            format_timestamp(c.end_ms),
            c.text
        ));
    }
    out
}
