//! Command-line front end: dataset generation, training, reconstruction,
//! free sampling, and the verification suite. Every run is reproducible
//! from its seeds, and every run that writes files also writes its fully
//! resolved configuration alongside them, so re-running with that sidecar
//! as `--config` reproduces the outputs byte for byte.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "capbm",
    version,
    about = "Train, sample, and verify Boltzmann machines over complex-valued units"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset of complex bar images.
    GenBars(commands::gen_bars::Args),
    /// Train a restricted machine on a complex dataset.
    Train(commands::train::Args),
    /// Reconstruct dataset samples and render the visible rates.
    Reconstruct(commands::reconstruct::Args),
    /// Run free sampling chains from random starts and render them.
    Sample(commands::sample::Args),
    /// Run the self-verification suite and report each check.
    Check(commands::check::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenBars(args) => commands::gen_bars::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Reconstruct(args) => commands::reconstruct::run(args),
        Command::Sample(args) => commands::sample::run(args),
        Command::Check(args) => commands::check::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
