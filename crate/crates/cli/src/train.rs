use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use fairpen::data::{load_csv, split_train_val, OutcomeKind, TabularDataset};
use fairpen::nn::{save_checkpoint, Activation, Mlp};
use fairpen::penalties::{empirical_pmf_ratio, GeoDiscriminator, GspDiscriminator};
use fairpen::rng::{stream, Stream};
use fairpen::training::{
    default_geo_pair, default_gsp_pair, train_geo, train_gsp, Observer, Snapshot, SnapshotWriter, Split, Task,
    TrainConfig, TrainResult,
};

use crate::config::{load_schema, Criterion, RunManifest};
use crate::parallel::parallel_map;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const MODEL_FILE: &str = "h.ckpt";
pub const DISCRIMINATOR_FILE: &str = "d.ckpt";
pub const BETA_FILE: &str = "beta_table.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const CHECKPOINT_DIR: &str = "checkpoints";

pub fn task_for(outcome: OutcomeKind) -> Task {
    match outcome {
        OutcomeKind::Binary => Task::BinaryClassification,
        OutcomeKind::Continuous => Task::Regression,
    }
}

/// Loads the manifest's dataset and splits it with the configured fraction
/// and seed.
pub fn load_split(manifest: &RunManifest) -> Result<(TabularDataset, TabularDataset)> {
    let schema = load_schema(&manifest.schema_path)?;
    let ds =
        load_csv(&manifest.data_path, &schema).with_context(|| format!("loading {}", manifest.data_path.display()))?;
    let cfg = &manifest.config;
    Ok(split_train_val(&ds, cfg.data.train_fraction, cfg.train.seed)?)
}

struct DiskObserver {
    writer: SnapshotWriter<BufWriter<File>>,
    checkpoints: Option<PathBuf>,
}

impl Observer for DiskObserver {
    fn on_snapshot(&mut self, snapshot: &Snapshot, h: &Mlp) -> fairpen::Result<()> {
        self.writer.write(snapshot)?;
        if let (Some(dir), Split::Validation) = (&self.checkpoints, snapshot.split) {
            save_checkpoint(h, &dir.join(format!("{}.ckpt", snapshot.checkpoint_id)))?;
        }
        Ok(())
    }
}

fn head(task: Task) -> Activation {
    match task {
        Task::BinaryClassification => Activation::Sigmoid,
        Task::Regression => Activation::Identity,
    }
}

fn model(manifest: &RunManifest, p: usize, task: Task, seed: u64) -> Result<Option<Mlp>> {
    Ok(match &manifest.config.model.hidden {
        Some(hidden) => Some(Mlp::feed_forward(p, hidden, true, head(task), &mut stream(seed, Stream::ModelInit))?),
        None => None,
    })
}

fn run_gsp(
    manifest: &RunManifest,
    tr: &TabularDataset,
    va: &TabularDataset,
    cfg: &TrainConfig,
    obs: &mut DiskObserver,
) -> Result<TrainResult> {
    let (mut h, mut d) = default_gsp_pair(tr.p(), tr.l(), cfg.task, cfg.seed)?;
    if let Some(custom) = model(manifest, tr.p(), cfg.task, cfg.seed)? {
        h = custom;
    }
    if let Some(hidden) = &manifest.config.model.discriminator_hidden {
        d = GspDiscriminator::new(tr.l(), hidden, true, &mut stream(cfg.seed, Stream::DiscriminatorInit))?;
    }
    Ok(train_gsp(tr, va, h, d, cfg, obs)?)
}

fn run_geo(
    manifest: &RunManifest,
    tr: &TabularDataset,
    va: &TabularDataset,
    cfg: &TrainConfig,
    obs: &mut DiskObserver,
) -> Result<TrainResult> {
    let (mut h, mut d) = default_geo_pair(tr.p(), tr.l(), cfg.task, cfg.seed)?;
    if let Some(custom) = model(manifest, tr.p(), cfg.task, cfg.seed)? {
        h = custom;
    }
    if let Some(hidden) = &manifest.config.model.discriminator_hidden {
        d = GeoDiscriminator::new(tr.l(), hidden, true, &mut stream(cfg.seed, Stream::DiscriminatorInit))?;
    }
    Ok(train_geo(tr, va, h, d, cfg, obs)?)
}

fn run_one(
    manifest: &RunManifest,
    tr: &TabularDataset,
    va: &TabularDataset,
    cfg: &TrainConfig,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join(CONFIG_FILE), manifest.config.to_toml()?)?;
    let checkpoints = if manifest.config.output.snapshot_checkpoints {
        let c = dir.join(CHECKPOINT_DIR);
        std::fs::create_dir_all(&c)?;
        Some(c)
    } else {
        None
    };
    let names: Vec<String> = tr.attrs().iter().map(|a| a.name.clone()).collect();
    let file = File::create(dir.join(SNAPSHOTS_FILE))?;
    let mut obs = DiskObserver { writer: SnapshotWriter::new(BufWriter::new(file), &names)?, checkpoints };
    let result = match manifest.criterion {
        Criterion::Gsp => run_gsp(manifest, tr, va, cfg, &mut obs)?,
        Criterion::Geo => run_geo(manifest, tr, va, cfg, &mut obs)?,
    };
    save_checkpoint(&result.h, &dir.join(MODEL_FILE))?;
    save_checkpoint(&result.discriminator, &dir.join(DISCRIMINATOR_FILE))?;
    if let Some(beta) = &result.beta {
        if tr.all_discrete() && tr.outcome() == OutcomeKind::Binary {
            empirical_pmf_ratio(tr)?.reweighted(beta)?.save_csv(&dir.join(BETA_FILE))?;
        }
    }
    Ok(())
}

/// One training run per λ under `out_dir/run_id/lambda=<λ>/`. Returns the run
/// directories in λ order.
///
/// Existing run directories are only replaced with `force`. A failing run
/// leaves whatever it has written so far and the other runs continue.
pub fn cmd_train(manifest: &RunManifest, force: bool, threads: usize) -> Result<Vec<PathBuf>> {
    manifest.validate()?;
    let (tr, va) = load_split(manifest)?;
    let task = task_for(tr.outcome());
    let configs: Vec<TrainConfig> = manifest.lambdas.iter().map(|&l| manifest.config.train_config(l, task)).collect();
    for c in &configs {
        c.validate()?;
    }
    let dirs: Vec<PathBuf> = manifest.lambdas.iter().map(|&l| manifest.lambda_dir(l)).collect();
    let existing: Vec<String> = dirs.iter().filter(|d| d.exists()).map(|d| d.display().to_string()).collect();
    if !existing.is_empty() {
        if !force {
            bail!(
                "refusing to overwrite existing run directories (use --force or a new --run-id): {}",
                existing.join(", ")
            );
        }
        for d in dirs.iter().filter(|d| d.exists()) {
            std::fs::remove_dir_all(d).with_context(|| format!("removing {}", d.display()))?;
        }
    }
    let jobs: Vec<(TrainConfig, PathBuf)> = configs.into_iter().zip(dirs.iter().cloned()).collect();
    let outcomes = parallel_map(jobs, threads, |(cfg, dir)| {
        run_one(manifest, &tr, &va, &cfg, &dir).with_context(|| format!("run {}", dir.display()))
    });
    for o in outcomes {
        o?;
    }
    Ok(dirs)
}
