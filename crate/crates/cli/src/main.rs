use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use fairpen_cli::config::{Criterion, RunConfig, RunManifest, SamplerArg, ScalingArg};
use fairpen_cli::evaluate::select;
use fairpen_cli::{
    cmd_evaluate, cmd_pareto, cmd_ratio_toy, cmd_train, guard_output, load_schema, thread_cap, ParetoArgs,
    RatioToyArgs, SplitArg,
};

#[derive(Parser)]
#[command(name = "fairpen", version, about = "Fairness-penalized training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model per lambda value and log snapshots.
    Train(TrainArgs),
    /// Score a checkpoint on a dataset and write a one-row report.
    Evaluate(EvaluateArgs),
    /// Pool snapshot logs and flag the Pareto frontier.
    Pareto(ParetoCli),
    /// Fit the density-ratio estimator on the four-cell toy and compare with
    /// the true ratios.
    RatioToy(RatioToyCli),
}

#[derive(Args)]
struct DataArgs {
    /// Run configuration (TOML with [data], [model], [train], [output]).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl DataArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(d) = &self.data {
            cfg.data.path = Some(d.clone());
        }
        if let Some(s) = &self.schema {
            cfg.data.schema = Some(s.clone());
        }
        if let Some(s) = self.seed {
            cfg.train.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output root; runs go to <out>/<run-id>/lambda=<value>/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trade-off weight; repeat for a grid.
    #[arg(long = "lambda")]
    lambdas: Vec<f64>,
    #[arg(long, value_enum)]
    criterion: Option<Criterion>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    #[arg(long, value_enum)]
    scaling: Option<ScalingArg>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    run_id: Option<String>,
    /// Replace existing run directories.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Validation)]
    split: SplitArg,
    /// Report CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ParetoCli {
    /// Snapshot logs to pool.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Fairness column, e.g. a_ks_gsp.
    #[arg(long)]
    metric: String,
    /// Split to keep; use "any" to keep every row.
    #[arg(long, default_value = "validation")]
    split: String,
    /// Summarize the k fairest snapshots whose utility passes this value.
    #[arg(long)]
    utility_threshold: Option<f64>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RatioToyCli {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Estimator training iterations.
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long, default_value_t = 100)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.005)]
    learning_rate: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = a.data.load()?;
    if let Some(c) = a.criterion {
        cfg.model.criterion = c;
    }
    if let Some(s) = a.sampler {
        cfg.train.sampler = s;
    }
    if let Some(s) = a.scaling {
        cfg.train.scaling = s;
    }
    if let Some(t) = a.iterations {
        cfg.train.iterations = t;
    }
    if !a.lambdas.is_empty() {
        cfg.train.lambdas = a.lambdas.clone();
    }
    if let Some(o) = &a.out {
        cfg.output.dir = o.clone();
    }
    if let Some(r) = &a.run_id {
        cfg.output.run_id = r.clone();
    }
    let manifest = RunManifest {
        config_path: a.data.config.clone(),
        data_path: cfg.data.path.clone().ok_or_else(|| anyhow!("no dataset given (--data or [data] path)"))?,
        schema_path: cfg.data.schema.clone().ok_or_else(|| anyhow!("no schema given (--schema or [data] schema)"))?,
        criterion: cfg.model.criterion,
        lambdas: cfg.train.lambdas.clone(),
        out_dir: cfg.output.dir.clone(),
        run_id: cfg.output.run_id.clone(),
        config: cfg,
    };
    for dir in cmd_train(&manifest, a.force, thread_cap())? {
        println!("{}", dir.display());
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    guard_output(&a.out, a.force)?;
    let cfg = a.data.load()?;
    let data_path = cfg.data.path.clone().ok_or_else(|| anyhow!("no dataset given (--data or [data] path)"))?;
    let schema_path = cfg.data.schema.clone().ok_or_else(|| anyhow!("no schema given (--schema or [data] schema)"))?;
    let schema = load_schema(&schema_path)?;
    let data = select(&data_path, &schema, a.split, cfg.data.train_fraction, cfg.train.seed)?;
    cmd_evaluate(&a.checkpoint, &data, a.split, &a.out)?;
    Ok(())
}

fn pareto(a: ParetoCli) -> Result<()> {
    guard_output(&a.out, a.force)?;
    let args = ParetoArgs {
        inputs: a.inputs,
        metric: a.metric,
        split: (a.split != "any").then_some(a.split),
        utility_threshold: a.utility_threshold,
        k: a.k,
    };
    if args.utility_threshold.is_some() {
        guard_output(&fairpen_cli::pareto::topk_path(&a.out), a.force)?;
    }
    let out = cmd_pareto(&args, &a.out)?;
    let on = out.rows.iter().filter(|r| r.on_frontier).count();
    println!("{} of {} snapshots on the frontier", on, out.rows.len());
    if let Some(t) = &out.topk {
        match (t.mean(), t.std()) {
            (Some(m), Some(s)) => {
                println!("top-{} {}: {m} ({s}) over {} qualifying", t.values.len(), out.metric, t.qualifying)
            }
            _ => println!("no snapshot passes the utility threshold"),
        }
    }
    Ok(())
}

fn ratio_toy(a: RatioToyCli) -> Result<()> {
    guard_output(&a.out, a.force)?;
    let args = RatioToyArgs {
        n: a.n,
        iterations: a.iterations,
        seed: a.seed,
        replicates: a.replicates,
        batch_size: a.batch_size,
        learning_rate: a.learning_rate,
    };
    for r in cmd_ratio_toy(&args, thread_cap(), &a.out)? {
        println!("{}: true {:.4} estimated {:.4} error {:.4}", r.cell, r.true_ratio, r.estimated_ratio, r.abs_error);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Pareto(a) => pareto(a),
        Command::RatioToy(a) => ratio_toy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
