use std::io::Write;

use crate::data::TabularDataset;
use crate::metrics::{fairness_report, FairnessReport};
use crate::nn::Mlp;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub split: Split,
    pub report: FairnessReport,
    /// Name under which a checkpoint of `h` at this iteration may be stored.
    pub checkpoint_id: String,
}

pub fn checkpoint_id(iteration: usize) -> String {
    format!("iter{iteration:08}")
}

/// Scores `dataset` with `h` in inference mode and computes the utility and
/// every applicable fairness metric. The decision threshold is chosen on the
/// same data.
pub fn evaluate_snapshot(h: &Mlp, dataset: &TabularDataset) -> Result<FairnessReport> {
    let scores = h.predict(dataset.x())?.into_vec();
    fairness_report(&scores, dataset.attrs(), dataset.y(), dataset.outcome(), None)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Header of the snapshot log for the given attribute names.
pub fn snapshot_header(attr_names: &[String]) -> Vec<String> {
    let mut h: Vec<String> =
        ["iteration", "split", "utility_name", "utility_value"].iter().map(|s| s.to_string()).collect();
    for name in attr_names {
        for m in ["sp", "ks_gsp", "eo", "ks_geo", "groups"] {
            h.push(format!("{name}_{m}"));
        }
    }
    h
}

pub fn snapshot_record(s: &Snapshot) -> Vec<String> {
    let r = &s.report;
    let mut rec = vec![
        s.iteration.to_string(),
        s.split.name().to_string(),
        r.utility.map(|u| u.name().to_string()).unwrap_or_default(),
        cell(r.utility.map(|u| u.value())),
    ];
    for a in &r.attributes {
        rec.extend([cell(a.sp), cell(a.ks_gsp), cell(a.eo), cell(a.ks_geo), a.groups.to_string()]);
    }
    rec
}

/// Append-only snapshot log.
pub struct SnapshotWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new(writer: W, attr_names: &[String]) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record(snapshot_header(attr_names))?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, snapshot: &Snapshot) -> Result<()> {
        self.inner.write_record(snapshot_record(snapshot))?;
        self.inner.flush()?;
        Ok(())
    }
}
