//! Reverse-mode automatic differentiation at desk scale: a recorded op
//! tape over dense 2-D double-precision arrays, exact gradients for every
//! primitive, and the Adam optimizer. No broadcasting, no implicit shape
//! coercion; every op validates shapes and finiteness.

mod adam;
mod array;
mod graph;
mod store;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use array::Array;
pub use graph::{CustomOp, Graph, TensorId};
pub use store::ParamStore;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("shape mismatch in {op}: {left} vs {right}")]
    ShapeMismatch { op: &'static str, left: String, right: String },
    #[error("op `{op}` produced a non-finite value")]
    NonFinite { op: String },
    #[error("backward requires a scalar loss, got shape {shape}")]
    NonScalarLoss { shape: String },
    #[error("graph already cleared by a backward pass")]
    GraphCleared,
    #[error("dropout probability {p} outside [0, 1)")]
    BadDropout { p: f64 },
    #[error("axis {axis} invalid for {op} (tensors are 2-D)")]
    BadAxis { op: &'static str, axis: usize },
    #[error("index {index} out of range for table with {rows} rows")]
    BadIndex { index: usize, rows: usize },
    #[error("slice {start}..{end} out of range for axis of size {size}")]
    BadSlice { start: usize, end: usize, size: usize },
    #[error("parameter `{0}` already registered")]
    DuplicateParam(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("checkpoint {path}: {detail}")]
    Checkpoint { path: String, detail: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
