//! `train`: fit a restricted machine to a dataset and write the checkpoint,
//! the training log, and the resolved configuration.

use crate::commands::sibling;
use crate::config::{FileValues, Resolved};
use capbm::data::load_dataset;
use capbm::learning::{init_params, train, Algorithm, TrainConfig};
use capbm::math::RngHandle;
use capbm::model::{save_checkpoint, Checkpoint};
use capbm::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

/// Substream tag for parameter initialization, distinct from the training
/// loop's own stream so the two never overlap.
const INIT_STREAM: u64 = 0x696e_6974;

#[derive(clap::Args)]
pub struct Args {
    /// Training dataset path.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Number of hidden units.
    #[arg(long)]
    hidden: Option<usize>,
    /// Training algorithm: cd1 or pcd.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Multiplicative shrinkage of coupling magnitudes per update.
    #[arg(long)]
    weight_decay: Option<f64>,
    /// Number of persistent fantasy chains (pcd only).
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Clamp the amplitude-coupling matrix to zero throughout (the
    /// phase-only ablation).
    #[arg(long)]
    no_amp_coupling: bool,
    /// Output checkpoint path; the log and resolved config are written
    /// alongside as .log and .config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_algo(raw: &str) -> Result<Algorithm> {
    match raw {
        "cd1" => Ok(Algorithm::Cd1),
        "pcd" => Ok(Algorithm::Pcd),
        other => Err(Error::Config(format!("unknown algorithm {other:?}, expected cd1 or pcd"))),
    }
}

fn algo_name(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Cd1 => "cd1",
        Algorithm::Pcd => "pcd",
    }
}

pub fn run(args: Args) -> Result<ExitCode> {
    let mut file = FileValues::load_opt(args.config.as_ref())?;
    let data_path: PathBuf = file.resolve_required("data", args.data)?;
    let out: PathBuf = file.resolve_required("out", args.out)?;
    let hidden = file.resolve("hidden", args.hidden, 200)?;
    let algorithm = parse_algo(&file.resolve("algo", args.algo, "cd1".to_string())?)?;
    let base = TrainConfig::defaults_for(algorithm);
    let amp_flag = if args.no_amp_coupling { Some(false) } else { None };
    let cfg = TrainConfig {
        learning_rate: file.resolve("learning_rate", args.learning_rate, base.learning_rate)?,
        epochs: file.resolve("epochs", args.epochs, base.epochs)?,
        batch_size: file.resolve("batch_size", args.batch_size, base.batch_size)?,
        weight_decay: file.resolve("weight_decay", args.weight_decay, base.weight_decay)?,
        algorithm,
        n_persistent_chains: file.resolve("chains", args.chains, base.n_persistent_chains)?,
        amp_coupling: file.resolve("amp_coupling", amp_flag, true)?,
        seed: file.resolve("seed", args.seed, base.seed)?,
    };
    file.finish()?;

    let data = load_dataset(&data_path)?;
    let mut init_rng = RngHandle::new(cfg.seed).substream(INIT_STREAM);
    let params0 = init_params(&data, hidden, &mut init_rng)?;
    let (params, log) = train(&params0, &data, &cfg, |epoch, _| {
        eprintln!("epoch {epoch}/{} done", cfg.epochs);
        Ok(())
    })?;
    save_checkpoint(&out, &Checkpoint::Restricted(params))?;

    let log_path = sibling(&out, "log");
    let mut text = String::new();
    for record in &log {
        text.push_str(&record.to_string());
        text.push('\n');
    }
    std::fs::write(&log_path, text)?;

    let mut resolved = Resolved::new();
    resolved.push("data", data_path.display());
    resolved.push("out", out.display());
    resolved.push("hidden", hidden);
    resolved.push("algo", algo_name(algorithm));
    resolved.push("epochs", cfg.epochs);
    resolved.push("learning_rate", cfg.learning_rate);
    resolved.push("batch_size", cfg.batch_size);
    resolved.push("weight_decay", cfg.weight_decay);
    resolved.push("chains", cfg.n_persistent_chains);
    resolved.push("amp_coupling", cfg.amp_coupling);
    resolved.push("seed", cfg.seed);
    resolved.write(&sibling(&out, "config"))?;

    let last = |name: &str| log.iter().rev().find(|r| r.metric == name).map(|r| r.value);
    match (last("recon_cosine"), last("free_energy")) {
        (Some(cos), Some(fe)) => println!(
            "trained {} for {} epochs on {} samples; final recon_cosine {cos:.4}, free_energy {fe:.4}",
            algo_name(algorithm),
            cfg.epochs,
            data.n_samples()
        ),
        _ => println!(
            "trained {} for {} epochs on {} samples",
            algo_name(algorithm),
            cfg.epochs,
            data.n_samples()
        ),
    }
    println!("wrote checkpoint to {}", out.display());
    Ok(ExitCode::SUCCESS)
}
