//! Library side of the `fairpen` command-line tool.
//!
//! Each subcommand has a `cmd_*` entry point that does the work and writes
//! its CSV outputs, so the commands can be driven from tests and other
//! programs without spawning the binary.

pub mod config;
pub mod evaluate;
pub mod parallel;
pub mod pareto;
pub mod ratio_toy;
pub mod train;

pub use config::{load_schema, Criterion, RunConfig, RunManifest};
pub use evaluate::{cmd_evaluate, evaluate_checkpoint, SplitArg};
pub use parallel::{thread_cap, THREADS_ENV};
pub use pareto::{cmd_pareto, pareto, ParetoArgs, ParetoOutput, ParetoRow};
pub use ratio_toy::{cmd_ratio_toy, ratio_toy, RatioToyArgs, RatioToyRow};
pub use train::cmd_train;

use std::path::Path;

/// Fails if `path` exists and `force` is not set.
pub fn guard_output(path: &Path, force: bool) -> anyhow::Result<()> {
    if path.exists() && !force {
        anyhow::bail!("{} already exists (use --force to replace it)", path.display());
    }
    Ok(())
}
