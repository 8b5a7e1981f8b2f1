use std::path::Path;

use anyhow::{bail, Context, Result};

use fairpen::data::{load_csv, split_train_val, Schema, TabularDataset};
use fairpen::metrics::FairnessReport;
use fairpen::nn::load_checkpoint;
use fairpen::training::{evaluate_snapshot, snapshot_header, snapshot_record, Snapshot, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SplitArg {
    Train,
    #[default]
    Validation,
    /// Every row, standardized on itself.
    All,
}

impl SplitArg {
    pub fn name(self) -> &'static str {
        match self {
            SplitArg::Train => "train",
            SplitArg::Validation => "validation",
            SplitArg::All => "all",
        }
    }
}

/// Selects the requested part of `data_path` the same way training does.
pub fn select(data_path: &Path, schema: &Schema, split: SplitArg, fraction: f64, seed: u64) -> Result<TabularDataset> {
    let ds = load_csv(data_path, schema).with_context(|| format!("loading {}", data_path.display()))?;
    Ok(match split {
        SplitArg::All => ds,
        SplitArg::Train => split_train_val(&ds, fraction, seed)?.0,
        SplitArg::Validation => split_train_val(&ds, fraction, seed)?.1,
    })
}

/// Scores `data` with the checkpointed model.
pub fn evaluate_checkpoint(checkpoint: &Path, data: &TabularDataset) -> Result<FairnessReport> {
    let h = load_checkpoint(checkpoint)?;
    if h.input_width() != data.p() {
        bail!(
            "checkpoint {} expects {} input features but the dataset has {}",
            checkpoint.display(),
            h.input_width(),
            data.p()
        );
    }
    if h.output_width() != 1 {
        bail!("checkpoint {} has {} outputs, expected 1", checkpoint.display(), h.output_width());
    }
    Ok(evaluate_snapshot(&h, data)?)
}

/// Snapshot-log columns without `iteration`, plus the decision threshold.
pub fn report_header(attr_names: &[String]) -> Vec<String> {
    let mut h = snapshot_header(attr_names)[1..].to_vec();
    h.push("threshold".into());
    h
}

pub fn report_record(report: &FairnessReport, split: &str) -> Vec<String> {
    let snap =
        Snapshot { iteration: 0, split: Split::Validation, report: report.clone(), checkpoint_id: String::new() };
    let mut rec = snapshot_record(&snap)[1..].to_vec();
    rec[0] = split.to_string();
    rec.push(report.threshold.map(|t| t.to_string()).unwrap_or_default());
    rec
}

/// Writes a single-row report CSV.
pub fn cmd_evaluate(checkpoint: &Path, data: &TabularDataset, split: SplitArg, out: &Path) -> Result<FairnessReport> {
    let report = evaluate_checkpoint(checkpoint, data)?;
    let names: Vec<String> = data.attrs().iter().map(|a| a.name.clone()).collect();
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(report_header(&names))?;
    w.write_record(report_record(&report, split.name()))?;
    w.flush()?;
    Ok(report)
}
