//! Subcommand implementations and the plumbing they share: row
//! binarization, step-checkpoint parsing, image-shape resolution,
//! trajectory rendering, and a small deterministic thread pool.

pub mod check;
pub mod gen_bars;
pub mod reconstruct;
pub mod sample;
pub mod train;

use capbm::data::render_complex_image;
use capbm::math::{Angle, RngHandle};
use capbm::model::{CapRbmParams, LayerDir, PhasorState};
use capbm::sampler::{rbm_layer_rate, rbm_sample_layer, AmplitudeMode, Rate};
use capbm::{Error, Result};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Appends a suffix to a file name: `model.capm` + `log` is
/// `model.capm.log`, keeping the primary output's name visible.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

/// Binarizes a data row at modulus 0.5: units above become phasors keeping
/// their phase, units below are switched off.
pub fn threshold_state(row: &[Complex64]) -> PhasorState {
    let mut state = PhasorState::all_off(row.len());
    for (j, z) in row.iter().enumerate() {
        if z.norm() > 0.5 {
            state.set_amp(j, true);
            state.set_phase(j, Angle::new(z.arg()));
        }
    }
    state
}

/// Parses a comma-separated list of alternation checkpoints, sorted and
/// deduplicated. `0` means the starting state itself.
pub fn parse_steps(raw: &str) -> Result<Vec<u64>> {
    let mut steps = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: u64 = part
            .parse()
            .map_err(|_| Error::Config(format!("bad step count {part:?} in steps list")))?;
        steps.push(v);
    }
    steps.sort_unstable();
    steps.dedup();
    if steps.is_empty() {
        return Err(Error::Config("steps list is empty".into()));
    }
    Ok(steps)
}

/// Joins resolved steps back into the canonical config-file spelling.
pub fn format_steps(steps: &[u64]) -> String {
    steps.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

/// Resolves an image shape: an explicit `WxH`, else the dataset's own shape,
/// else a square inferred from the unit count.
pub fn resolve_shape(
    raw: &str,
    n_units: usize,
    dataset_shape: Option<(usize, usize)>,
) -> Result<(usize, usize)> {
    if raw != "auto" {
        let parsed: Option<(usize, usize)> = raw
            .split_once('x')
            .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)));
        let Some((w, h)) = parsed else {
            return Err(Error::Config(format!("bad shape {raw:?}, expected WxH")));
        };
        if w * h != n_units {
            return Err(Error::Shape(format!(
                "shape {w}x{h} does not match {n_units} units"
            )));
        }
        return Ok((w, h));
    }
    if let Some((w, h)) = dataset_shape {
        if w * h == n_units {
            return Ok((w, h));
        }
    }
    let side = (n_units as f64).sqrt().round() as usize;
    if side * side == n_units {
        return Ok((side, side));
    }
    Err(Error::Config(format!(
        "cannot infer an image shape for {n_units} units; pass --shape WxH"
    )))
}

/// Formats a shape in the `WxH` spelling used by `--shape`.
pub fn format_shape(shape: (usize, usize)) -> String {
    format!("{}x{}", shape.0, shape.1)
}

/// Display vector of a visible rate: the value channel carries the
/// activation probability, the hue the expected phase.
pub fn rate_display(rate: &Rate) -> Vec<Complex64> {
    rate.complex_mean
        .iter()
        .zip(&rate.amp_mean)
        .map(|(c, &p)| {
            let phase = if c.norm() > 0.0 { c.arg() } else { 0.0 };
            Complex64::from_polar(p, phase)
        })
        .collect()
}

/// Runs one block-alternation trajectory from `start`, rendering the
/// visible rate at every requested checkpoint. A checkpoint `t` means `t`
/// hidden-layer samplings: the image shows the visible rates given the
/// hidden sample of alternation `t`, and the trajectory continues from a
/// visible sample. Checkpoint 0 renders the starting state itself. Images
/// at a given checkpoint do not depend on which other checkpoints were
/// requested.
#[allow(clippy::too_many_arguments)]
pub fn render_trajectory(
    params: &CapRbmParams,
    start: &PhasorState,
    steps: &[u64],
    shape: (usize, usize),
    global_phase: Angle,
    dir: &Path,
    stem: &str,
    rng: &mut RngHandle,
) -> Result<()> {
    let render = |tag: u64, row: &[Complex64]| -> Result<()> {
        let path = dir.join(format!("{stem}-step{tag:04}.ppm"));
        render_complex_image(row, shape, &path, global_phase)
    };
    let mut pending = steps.iter().copied().peekable();
    if pending.peek() == Some(&0) {
        pending.next();
        render(0, &start.to_complex())?;
    }
    let Some(&last) = steps.last() else { return Ok(()) };
    let mut v = start.clone();
    for t in 1..=last {
        let h = rbm_sample_layer(
            params,
            &v,
            LayerDir::VisibleToHidden,
            AmplitudeMode::Stochastic,
            rng,
        )?;
        if pending.peek() == Some(&t) {
            pending.next();
            let rate = rbm_layer_rate(params, &h.to_complex(), LayerDir::HiddenToVisible)?;
            render(t, &rate_display(&rate))?;
        }
        if t < last {
            v = rbm_sample_layer(
                params,
                &h,
                LayerDir::HiddenToVisible,
                AmplitudeMode::Stochastic,
                rng,
            )?;
        }
    }
    Ok(())
}

/// Runs `tasks` independent indexed jobs across at most `threads` workers.
/// Work is handed out by an atomic counter; outputs must depend only on the
/// job index, so results are identical for any worker count.
pub fn run_parallel<F>(tasks: usize, threads: usize, job: F) -> Result<()>
where
    F: Fn(usize) -> Result<()> + Sync,
{
    if threads == 0 {
        return Err(Error::Config("thread count must be at least 1".into()));
    }
    let workers = threads.min(tasks);
    if workers <= 1 {
        for i in 0..tasks {
            job(i)?;
        }
        return Ok(());
    }
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for _ in 0..workers {
            handles.push(scope.spawn(|| -> Result<()> {
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= tasks {
                        return Ok(());
                    }
                    job(i)?;
                }
            }));
        }
        for handle in handles {
            handle
                .join()
                .map_err(|_| Error::Domain("a worker thread panicked".into()))??;
        }
        Ok(())
    })
}
