pub mod ablate;
pub mod align;
pub mod eval;
pub mod features;
pub mod synth;
pub mod train;
