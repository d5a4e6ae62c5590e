//! `opmine synth`: generate the self-contained fixture dataset (sentences,
//! subtitles, audio, video features, embeddings) used by the examples and
//! the end-to-end tests.

use anyhow::Result;
use clap::Args;
use std::path::{Path, PathBuf};

use opmine::synth::write_fixture;

use crate::cfgfile::{pick, require, SynthSection};
use crate::manifest::ManifestBuilder;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory to write the fixture into.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generator seed; the files are a pure function of it.
    #[arg(long)]
    seed: Option<u64>,
}

fn relative_name(root: &Path, path: &Path) -> String {
    path.strip_prefix(root).unwrap_or(path).display().to_string()
}

pub fn run(args: SynthArgs, file: SynthSection) -> Result<()> {
    let out = require(args.out, file.out, "out")?;
    let seed = pick(args.seed, file.seed, 7);

    std::fs::create_dir_all(&out)?;
    let paths = write_fixture(&out, seed)?;

    let config = serde_json::json!({
        "seed": seed,
    });
    let mut manifest = ManifestBuilder::new("synth", config);
    manifest.output(&relative_name(&out, &paths.basic));
    manifest.output(&relative_name(&out, &paths.embeddings));
    manifest.output(&relative_name(&out, &paths.media_corpus));
    for clip in &paths.clips {
        manifest.output(&relative_name(&out, &clip.srt));
        manifest.output(&relative_name(&out, &clip.wav));
        manifest.output(&relative_name(&out, &clip.video));
    }
    manifest.write(&out)?;

    println!("wrote fixture (seed {seed}) under {}", out.display());
    println!("  {}", paths.basic.display());
    println!("  {}", paths.embeddings.display());
    println!("  {}", paths.media_corpus.display());
    for clip in &paths.clips {
        println!("  {} + .wav + .vft", clip.srt.display());
    }
    Ok(())
}
