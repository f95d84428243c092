//! `gen-bars`: write a synthetic dataset of complex bar images.

use crate::commands::sibling;
use crate::config::{FileValues, Resolved};
use capbm::data::{gen_bars, save_dataset, BarsConfig};
use capbm::Result;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct Args {
    /// Number of samples to generate.
    #[arg(long)]
    n: Option<usize>,
    /// Generator seed; fixed seeds give bit-identical files.
    #[arg(long)]
    seed: Option<u64>,
    /// Output dataset path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let mut file = FileValues::load_opt(args.config.as_ref())?;
    let n = file.resolve("n", args.n, 40_000)?;
    let seed = file.resolve("seed", args.seed, 0u64)?;
    let out: PathBuf = file.resolve_required("out", args.out)?;
    file.finish()?;

    let cfg = BarsConfig { seed, ..BarsConfig::default() };
    let ds = gen_bars(&cfg, n)?;
    save_dataset(&out, &ds)?;

    let mut resolved = Resolved::new();
    resolved.push("n", n);
    resolved.push("seed", seed);
    resolved.push("out", out.display());
    resolved.write(&sibling(&out, "config"))?;

    println!(
        "wrote {} samples of {} units ({}x{}) to {}; mean on-fraction {:.4}",
        ds.n_samples(),
        ds.n_units(),
        cfg.side,
        cfg.side,
        out.display(),
        ds.mean_on_fraction()
    );
    Ok(ExitCode::SUCCESS)
}
