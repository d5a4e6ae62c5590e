//! Command-line front end for the opmine toolkit: subtitle alignment,
//! media feature extraction, training, evaluation, ablation sweeps, and
//! fixture generation.

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod cfgfile;
mod cmd;
mod common;
mod exit;
mod manifest;

use cfgfile::FileConfig;
use exit::exit_code;

#[derive(Debug, Parser)]
#[command(
    name = "opmine",
    version,
    about = "Multi-modal fine-grained opinion mining: align, extract, train, evaluate"
)]
struct Cli {
    /// TOML config file; sections mirror the subcommand flags, and flags
    /// given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Match sentences against SRT subtitles to recover time spans.
    Align(cmd::align::AlignArgs),
    /// Slice media into per-sentence feature segments and cache them.
    Features(cmd::features::FeaturesArgs),
    /// Train the sequence labeler (single split, multi-seed, or k-fold).
    Train(cmd::train::TrainArgs),
    /// Score a TOKEN GOLD PRED predictions file.
    Eval(cmd::eval::EvalArgs),
    /// Cross-validate the seven-variant grid with paired t-tests.
    Ablate(cmd::ablate::AblateArgs),
    /// Generate the synthetic fixture dataset.
    Synth(cmd::synth::SynthArgs),
}

fn dispatch(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Align(args) => cmd::align::run(args, file.align),
        Command::Features(args) => cmd::features::run(args, file.features),
        Command::Train(args) => cmd::train::run(args, file.train),
        Command::Eval(args) => cmd::eval::run(args, file.eval),
        Command::Ablate(args) => cmd::ablate::run(args, file.ablate),
        Command::Synth(args) => cmd::synth::run(args, file.synth),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
