//! Run configuration files and the resolved run manifest.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fairpen::data::{SamplerKind, Schema};
use fairpen::penalties::BetaPoint;
use fairpen::training::{BetaKind, Scaling, Task, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gsp,
    Geo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    #[default]
    Within,
    Disjoint,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Within => SamplerKind::WithinBatch,
            SamplerArg::Disjoint => SamplerKind::Disjoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScalingArg {
    #[default]
    Convex,
    Plain,
}

impl From<ScalingArg> for Scaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::Convex => Scaling::Convex,
            ScalingArg::Plain => Scaling::Plain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaArg {
    #[default]
    Neural,
    Empirical,
    Unit,
}

impl From<BetaArg> for BetaKind {
    fn from(b: BetaArg) -> Self {
        match b {
            BetaArg::Neural => BetaKind::Neural,
            BetaArg::Empirical => BetaKind::Empirical,
            BetaArg::Unit => BetaKind::Unit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaPointArg {
    #[default]
    Paired,
    Resampled,
}

impl From<BetaPointArg> for BetaPoint {
    fn from(b: BetaPointArg) -> Self {
        match b {
            BetaPointArg::Paired => BetaPoint::Paired,
            BetaPointArg::Resampled => BetaPoint::Resampled,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub train_fraction: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        Self { path: None, schema: None, train_fraction: 0.8 }
    }
}

/// Hidden widths default to the standard architectures when omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub criterion: Criterion,
    pub hidden: Option<Vec<usize>>,
    pub discriminator_hidden: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub lambdas: Vec<f64>,
    pub learning_rate: f64,
    pub iterations: usize,
    pub disc_steps: usize,
    pub ratio_iterations: usize,
    pub batch_size: usize,
    pub eval_interval: usize,
    pub seed: u64,
    pub sampler: SamplerArg,
    pub scaling: ScalingArg,
    pub beta: BetaArg,
    pub beta_point: BetaPointArg,
    pub eval_train: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            lambdas: vec![d.lambda],
            learning_rate: d.learning_rate,
            iterations: d.iterations,
            disc_steps: d.disc_steps,
            ratio_iterations: d.ratio_iterations,
            batch_size: d.batch_size,
            eval_interval: d.eval_interval,
            seed: d.seed,
            sampler: SamplerArg::default(),
            scaling: ScalingArg::default(),
            beta: BetaArg::default(),
            beta_point: BetaPointArg::default(),
            eval_train: d.eval_train,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub run_id: String,
    /// Save `h` at every snapshot under `checkpoints/`.
    pub snapshot_checkpoints: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("runs"), run_id: "run".into(), snapshot_checkpoints: true }
    }
}

/// Contents of a run configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub model: ModelSection,
    pub train: TrainSection,
    pub output: OutputSection,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    /// Parses a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.data.path = cfg.data.path.map(|p| resolve(base, &p));
        cfg.data.schema = cfg.data.schema.map(|p| resolve(base, &p));
        cfg.output.dir = resolve(base, &cfg.output.dir);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn train_config(&self, lambda: f64, task: Task) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            lambda,
            learning_rate: t.learning_rate,
            iterations: t.iterations,
            disc_steps: t.disc_steps,
            ratio_iterations: t.ratio_iterations,
            batch_size: t.batch_size,
            eval_interval: t.eval_interval,
            seed: t.seed,
            sampler: t.sampler.into(),
            task,
            scaling: t.scaling.into(),
            beta: t.beta.into(),
            beta_point: t.beta_point.into(),
            eval_train: t.eval_train,
        }
    }
}

/// Reads a schema file: a TOML document with one `[[columns]]` table per
/// column (`name`, `role`, `kind`, optional `categories`).
pub fn load_schema(path: &Path) -> Result<Schema> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading schema {}", path.display()))?;
    let schema: Schema = toml::from_str(&text).with_context(|| format!("parsing schema {}", path.display()))?;
    schema.validate()?;
    Ok(schema)
}

/// Everything a training invocation needs, after merging the config file
/// with command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub data_path: PathBuf,
    pub schema_path: PathBuf,
    pub criterion: Criterion,
    pub lambdas: Vec<f64>,
    pub out_dir: PathBuf,
    pub run_id: String,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            bail!("no lambda values given");
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            bail!("lambda {l} is outside [0, 1]");
        }
        for (i, l) in self.lambdas.iter().enumerate() {
            if self.lambdas[..i].contains(l) {
                bail!("lambda {l} is listed twice");
            }
        }
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) || self.run_id == "." || self.run_id == ".." {
            bail!("invalid run id '{}'", self.run_id);
        }
        Ok(())
    }

    pub fn run_dir(&self) -> PathBuf {
        self.out_dir.join(&self.run_id)
    }

    pub fn lambda_dir(&self, lambda: f64) -> PathBuf {
        self.run_dir().join(lambda_dir_name(lambda))
    }
}

pub fn lambda_dir_name(lambda: f64) -> String {
    format!("lambda={lambda}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.train.learning_rate, 0.005);
        assert_eq!(cfg.train.eval_interval, 100);
    }

    #[test]
    fn sections_parse_and_unknown_keys_are_rejected() {
        let cfg: RunConfig = toml::from_str(
            "[model]\ncriterion = \"geo\"\n[train]\nlambdas = [0.1, 0.9]\nsampler = \"disjoint\"\nbeta = \"unit\"\n",
        )
        .unwrap();
        assert_eq!(cfg.model.criterion, Criterion::Geo);
        assert_eq!(cfg.train.lambdas, vec![0.1, 0.9]);
        assert_eq!(cfg.train_config(0.1, Task::BinaryClassification).sampler, SamplerKind::Disjoint);
        assert!(toml::from_str::<RunConfig>("[train]\nlamda = 0.1\n").is_err());
        assert_eq!(toml::from_str::<RunConfig>(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn manifest_validation() {
        let mut m = RunManifest {
            config_path: None,
            data_path: "d.csv".into(),
            schema_path: "s.toml".into(),
            criterion: Criterion::Gsp,
            lambdas: vec![0.1, 0.5],
            out_dir: "out".into(),
            run_id: "r".into(),
            config: RunConfig::default(),
        };
        assert!(m.validate().is_ok());
        assert_eq!(m.lambda_dir(0.5), PathBuf::from("out/r/lambda=0.5"));
        m.lambdas = vec![1.5];
        assert!(m.validate().is_err());
        m.lambdas = vec![0.1, 0.1];
        assert!(m.validate().is_err());
        m.lambdas = vec![0.1];
        m.run_id = "../x".into();
        assert!(m.validate().is_err());
    }
}
