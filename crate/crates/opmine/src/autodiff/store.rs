//! Named parameter collection and bit-exact checkpointing.
//!
//! Checkpoint layout: 8-byte magic, u32 manifest length, JSON manifest
//! (caller metadata plus per-parameter name/shape/offset), then all values
//! as one little-endian f64 blob. Offsets count f64 slots from blob start.

use super::array::Array;
use super::AutodiffError;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

const MAGIC: &[u8; 8] = b"OPMCKPT1";

/// Ordered, named parameter arrays. Iteration order is insertion order and
/// defines the optimizer's parameter indexing.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Array>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    rows: usize,
    cols: usize,
    offset: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    meta: serde_json::Value,
    params: Vec<ManifestEntry>,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn insert(&mut self, name: &str, value: Array) -> Result<(), AutodiffError> {
        if self.index.contains_key(name) {
            return Err(AutodiffError::DuplicateParam(name.to_string()));
        }
        self.index.insert(name.to_string(), self.values.len());
        self.names.push(name.to_string());
        self.values.push(value);
        Ok(())
    }

    /// Inserts a parameter initialized uniformly from [-range, range].
    pub fn insert_uniform(
        &mut self,
        name: &str,
        rows: usize,
        cols: usize,
        range: f64,
        rng: &mut impl Rng,
    ) -> Result<(), AutodiffError> {
        let data = (0..rows * cols).map(|_| rng.random_range(-range..=range)).collect();
        self.insert(name, Array::from_vec(rows, cols, data))
    }

    /// Inserts zeros (the conventional bias init).
    pub fn insert_zeros(&mut self, name: &str, rows: usize, cols: usize) -> Result<(), AutodiffError> {
        self.insert(name, Array::zeros(rows, cols))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Result<&Array, AutodiffError> {
        self.index
            .get(name)
            .map(|&i| &self.values[i])
            .ok_or_else(|| AutodiffError::UnknownParam(name.to_string()))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Array, AutodiffError> {
        match self.index.get(name) {
            Some(&i) => Ok(&mut self.values[i]),
            None => Err(AutodiffError::UnknownParam(name.to_string())),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name_at(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn value_at(&self, i: usize) -> &Array {
        &self.values[i]
    }

    pub fn values_mut(&mut self) -> &mut [Array] {
        &mut self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array)> {
        self.names.iter().map(String::as_str).zip(self.values.iter())
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.values.iter().map(|v| v.shape()).collect()
    }

    /// Serializes all parameters plus caller metadata.
    pub fn save(&self, path: &Path, meta: &serde_json::Value) -> Result<(), AutodiffError> {
        let mut entries = Vec::with_capacity(self.values.len());
        let mut offset = 0usize;
        for (name, value) in self.iter() {
            entries.push(ManifestEntry {
                name: name.to_string(),
                rows: value.rows(),
                cols: value.cols(),
                offset,
            });
            offset += value.len();
        }
        let manifest = Manifest { meta: meta.clone(), params: entries };
        let manifest_json = serde_json::to_vec(&manifest).map_err(|e| AutodiffError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;

        let mut bytes = Vec::with_capacity(12 + manifest_json.len() + offset * 8);
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&(manifest_json.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&manifest_json);
        for value in &self.values {
            for &v in value.data() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        std::fs::write(path, bytes)
            .map_err(|source| AutodiffError::Io { path: path.display().to_string(), source })
    }

    /// Loads a checkpoint; values round-trip bit-exactly.
    pub fn load(path: &Path) -> Result<(ParamStore, serde_json::Value), AutodiffError> {
        let display = path.display().to_string();
        let bytes = std::fs::read(path)
            .map_err(|source| AutodiffError::Io { path: display.clone(), source })?;
        let fail = |detail: &str| AutodiffError::Checkpoint {
            path: display.clone(),
            detail: detail.to_string(),
        };
        if bytes.len() < 12 || &bytes[0..8] != MAGIC {
            return Err(fail("not a checkpoint file (bad magic)"));
        }
        let manifest_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let blob_start = 12 + manifest_len;
        if bytes.len() < blob_start {
            return Err(fail("truncated manifest"));
        }
        let manifest: Manifest = serde_json::from_slice(&bytes[12..blob_start])
            .map_err(|e| fail(&format!("bad manifest: {e}")))?;
        let blob = &bytes[blob_start..];

        let mut store = ParamStore::new();
        for entry in &manifest.params {
            let count = entry.rows * entry.cols;
            let byte_start = entry.offset * 8;
            let byte_end = byte_start + count * 8;
            if byte_end > blob.len() {
                return Err(fail(&format!("parameter `{}` exceeds blob", entry.name)));
            }
            let data: Vec<f64> = blob[byte_start..byte_end]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            store
                .insert(&entry.name, Array::from_vec(entry.rows, entry.cols, data))
                .map_err(|_| fail(&format!("duplicate parameter `{}`", entry.name)))?;
        }
        Ok((store, manifest.meta))
    }
}
