//! `reconstruct`: clamp thresholded dataset samples into a trained machine,
//! run alternating updates, and render the visible rates at chosen steps.

use crate::commands::{
    format_shape, format_steps, parse_steps, render_trajectory, resolve_shape, run_parallel,
    threshold_state,
};
use crate::config::{FileValues, Resolved};
use capbm::data::load_dataset;
use capbm::math::{Angle, RngHandle};
use capbm::model::load_checkpoint;
use capbm::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args)]
pub struct Args {
    /// Trained checkpoint path (restricted machines only).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Dataset whose leading samples are reconstructed.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Comma-separated update counts at which to render, e.g. 1,5,20,100.
    #[arg(long)]
    steps: Option<String>,
    /// How many samples to reconstruct (from the start of the dataset).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Phase offset in radians added to every pixel's hue at render time.
    #[arg(long)]
    global_phase: Option<f64>,
    /// Image shape as WxH, or "auto" to take it from the dataset.
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
    let data_path: PathBuf = file.resolve_required("data", args.data)?;
    let render_dir: PathBuf = file.resolve_required("render_dir", args.render_dir)?;
    let steps_raw = file.resolve("steps", args.steps, "1,5,20,100".to_string())?;
    let n_requested = file.resolve("n", args.n, 10)?;
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
    let data = load_dataset(&data_path)?;
    if data.n_units() != params.n_visible() {
        return Err(Error::Shape(format!(
            "dataset has {} units but the model has {} visible units",
            data.n_units(),
            params.n_visible()
        )));
    }
    if data.n_samples() == 0 {
        return Err(Error::Shape("dataset is empty".into()));
    }
    let steps = parse_steps(&steps_raw)?;
    let shape = resolve_shape(&shape_raw, params.n_visible(), data.shape())?;
    let n = n_requested.min(data.n_samples());
    std::fs::create_dir_all(&render_dir)?;

    run_parallel(n, threads, |i| {
        let mut rng = RngHandle::new(seed).substream(i as u64);
        let start = threshold_state(data.sample(i));
        render_trajectory(
            &params,
            &start,
            &steps,
            shape,
            phase,
            &render_dir,
            &format!("recon-{i:03}"),
            &mut rng,
        )
    })?;

    let mut resolved = Resolved::new();
    resolved.push("model", model_path.display());
    resolved.push("data", data_path.display());
    resolved.push("steps", format_steps(&steps));
    resolved.push("n", n);
    resolved.push("seed", seed);
    resolved.push("global_phase", global_phase);
    resolved.push("shape", format_shape(shape));
    resolved.push("render_dir", render_dir.display());
    resolved.push("threads", threads);
    resolved.write(&render_dir.join("run.config"))?;

    println!(
        "reconstructed {n} samples at steps {} into {}",
        format_steps(&steps),
        render_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}
