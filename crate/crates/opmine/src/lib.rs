//! Multi-modal fine-grained opinion mining toolkit.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`subalign`] locates transcribed sentences inside subtitle files and
//!    assigns them time spans.
//! 2. [`features`] turns the audio/video under a time span into fixed-rate
//!    feature frames (log spectrograms, precomputed clip descriptors).
//! 3. [`model`] + [`train`] fit a BiGRU sequence labeler with self-attention
//!    and an optional CRF output layer over fused text/audio/video encodings.
//! 4. [`eval`] scores predictions with chunk-level precision/recall/F1 and
//!    compares runs with paired t-tests.
//!
//! [`labels`] defines the tagging schemes shared by every stage, [`ingest`]
//! reads the on-disk formats, [`autodiff`] provides the reverse-mode
//! differentiation engine the model is built on, and [`synth`] generates the
//! deterministic fixture datasets used by the integration tests and the
//! `synth` CLI command.

pub mod autodiff;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod labels;
pub mod model;
pub mod subalign;
pub mod synth;
pub mod train;
