//! `sample`: start alternating chains from random visible states and render
//! the visible rates at chosen steps.

use crate::commands::{format_shape, format_steps, parse_steps, render_trajectory, resolve_shape, run_parallel};
use crate::config::{FileValues, Resolved};
use capbm::math::{Angle, RngHandle};
use capbm::model::{load_checkpoint, PhasorState};
use capbm::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct Args {
    /// Trained checkpoint path (restricted machines only).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Comma-separated update counts at which to render, e.g. 1,5,20,100.
    #[arg(long)]
    steps: Option<String>,
    /// How many independent chains to sample.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Phase offset in radians added to every pixel's hue at render time.
    #[arg(long)]
    global_phase: Option<f64>,
    /// Image shape as WxH, or "auto" to infer a square from the unit count.
    #[arg(long)]
    shape: Option<String>,
    /// Directory for the rendered images.
    #[arg(long)]
    render_dir: Option<PathBuf>,
    /// Worker thread cap; outputs are identical for any positive value.
    #[arg(long)]
    threads: Option<usize>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let mut file = FileValues::load_opt(args.config.as_ref())?;
    let model_path: PathBuf = file.resolve_required("model", args.model)?;
    let render_dir: PathBuf = file.resolve_required("render_dir", args.render_dir)?;
    let steps_raw = file.resolve("steps", args.steps, "1,5,20,100".to_string())?;
    let n = file.resolve("n", args.n, 9usize)?;
    let seed = file.resolve("seed", args.seed, 0u64)?;
    let global_phase = file.resolve("global_phase", args.global_phase, 0.0)?;
    let shape_raw = file.resolve("shape", args.shape, "auto".to_string())?;
    let threads = file.resolve("threads", args.threads, 1usize)?;
    file.finish()?;
    if !global_phase.is_finite() {
        return Err(Error::Config("global_phase must be finite".into()));
    }
    let phase = Angle::new(global_phase.rem_euclid(std::f64::consts::TAU));

    let params = load_checkpoint(&model_path)?.into_restricted()?;
    let steps = parse_steps(&steps_raw)?;
    let shape = resolve_shape(&shape_raw, params.n_visible(), None)?;
    std::fs::create_dir_all(&render_dir)?;

    run_parallel(n, threads, |i| {
        let mut rng = RngHandle::new(seed).substream(i as u64);
        let start = PhasorState::random(params.n_visible(), &mut rng);
        render_trajectory(
            &params,
            &start,
            &steps,
            shape,
            phase,
            &render_dir,
            &format!("sample-{i:03}"),
            &mut rng,
        )
    })?;

    let mut resolved = Resolved::new();
    resolved.push("model", model_path.display());
    resolved.push("steps", format_steps(&steps));
    resolved.push("n", n);
    resolved.push("seed", seed);
    resolved.push("global_phase", global_phase);
    resolved.push("shape", format_shape(shape));
    resolved.push("render_dir", render_dir.display());
    resolved.push("threads", threads);
    resolved.write(&render_dir.join("run.config"))?;

    println!(
        "sampled {n} chains at steps {} into {}",
        format_steps(&steps),
        render_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}
