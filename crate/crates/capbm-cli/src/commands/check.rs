//! `check`: run the built-in self-check suite and report one line per check.

use capbm::oracle::{run_checks, CheckLevel};
use capbm::Result;
use std::process::ExitCode;

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum Level {
    /// Fast analytic and round-trip checks (seconds).
    Quick,
    /// Everything, including Monte Carlo stationarity and finite-difference
    /// gradient checks (minutes).
    Full,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    level: Level,
}

pub fn run(args: Args) -> Result<ExitCode> {
    let level = match args.level {
        Level::Quick => CheckLevel::Quick,
        Level::Full => CheckLevel::Full,
    };
    let results = run_checks(level);
    for result in &results {
        println!("{result}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        println!("all {} checks passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failed} of {} checks failed", results.len());
        Ok(ExitCode::FAILURE)
    }
}
