use std::path::Path;

use anyhow::{bail, Context, Result};

use fairpen::oracles::{ratio_toy_dataset, ratio_toy_truth, RATIO_TOY_CELLS};
use fairpen::penalties::{beta_value, pretrain_density_ratio, RatioConfig};

use crate::parallel::parallel_map;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioToyArgs {
    pub n: usize,
    /// Estimator training iterations `L`.
    pub iterations: usize,
    pub seed: u64,
    /// Independent datasets and fits, seeded `seed, seed + 1, …`.
    pub replicates: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for RatioToyArgs {
    fn default() -> Self {
        Self { n: 10_000, iterations: 10_000, seed: 0, replicates: 1, batch_size: 100, learning_rate: 0.005 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioToyRow {
    pub cell: String,
    pub true_ratio: f64,
    /// Mean estimate over replicates.
    pub estimated_ratio: f64,
    /// Mean absolute error over replicates.
    pub abs_error: f64,
}

/// Estimates for one seed, in cell order.
pub fn ratio_toy_replicate(args: &RatioToyArgs, seed: u64) -> Result<[f64; 4]> {
    let ds = ratio_toy_dataset(args.n, seed)?;
    let est = pretrain_density_ratio(
        &ds,
        &RatioConfig {
            iterations: args.iterations,
            batch_size: args.batch_size.min(args.n),
            learning_rate: args.learning_rate,
            seed,
            ..Default::default()
        },
    )?;
    let mut out = [0.0; 4];
    for (o, (a, y)) in out.iter_mut().zip(RATIO_TOY_CELLS) {
        *o = beta_value(&est, &[f64::from(a)], f64::from(y))?;
    }
    Ok(out)
}

pub fn ratio_toy(args: &RatioToyArgs, threads: usize) -> Result<Vec<RatioToyRow>> {
    if args.n == 0 || args.iterations == 0 || args.replicates == 0 || args.batch_size == 0 {
        bail!("n, iterations, replicates and batch size must all be at least 1");
    }
    let seeds: Vec<u64> = (0..args.replicates as u64).map(|r| args.seed.wrapping_add(r)).collect();
    let fits = parallel_map(seeds, threads, |s| ratio_toy_replicate(args, s));
    let fits: Vec<[f64; 4]> = fits.into_iter().collect::<Result<_>>()?;
    let truth = ratio_toy_truth();
    let reps = fits.len() as f64;
    Ok(RATIO_TOY_CELLS
        .iter()
        .enumerate()
        .map(|(k, (a, y))| RatioToyRow {
            cell: format!("a={a} y={y}"),
            true_ratio: truth[k],
            estimated_ratio: fits.iter().map(|f| f[k]).sum::<f64>() / reps,
            abs_error: fits.iter().map(|f| (f[k] - truth[k]).abs()).sum::<f64>() / reps,
        })
        .collect())
}

pub fn write_ratio_toy(rows: &[RatioToyRow], out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(["cell", "true_ratio", "estimated_ratio", "abs_error"])?;
    for r in rows {
        w.write_record([
            r.cell.clone(),
            r.true_ratio.to_string(),
            r.estimated_ratio.to_string(),
            r.abs_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_ratio_toy(args: &RatioToyArgs, threads: usize, out: &Path) -> Result<Vec<RatioToyRow>> {
    let rows = ratio_toy(args, threads)?;
    write_ratio_toy(&rows, out)?;
    Ok(rows)
}
