//! Per-run manifest: what ran, on which inputs, producing which outputs.
//!
//! The `content_hash` covers the command, merged config, input digests, and
//! output names, but never the timestamps, so re-running with identical
//! inputs and seed yields an identical hash even though the wall-clock
//! fields differ.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    /// Input path -> sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// File names written into the run directory, in write order.
    pub outputs: Vec<String>,
    /// sha256 over (command, config, inputs, outputs); timestamp-free.
    pub content_hash: String,
    pub started_at_ms: u64,
    pub finished_at_ms: u64,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
    started_at_ms: u64,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            started_at_ms: now_ms(),
        }
    }

    /// Registers and digests one input file.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Registers a produced file by its name inside the run directory.
    pub fn output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    /// Finalizes and writes `manifest.json` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<RunManifest> {
        self.outputs.push("manifest.json".to_string());
        let hashed = serde_json::to_vec(&(
            &self.command,
            &self.config,
            &self.inputs,
            &self.outputs,
        ))?;
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            content_hash: hex::encode(Sha256::digest(&hashed)),
            started_at_ms: self.started_at_ms,
            finished_at_ms: now_ms(),
        };
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}
