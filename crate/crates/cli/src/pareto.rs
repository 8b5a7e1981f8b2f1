use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use fairpen::metrics::{pareto_mask, topk_fair_summary, ParetoPoint, TopkSummary};

/// One pooled snapshot row.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRow {
    pub run_id: String,
    pub iteration: String,
    pub utility_name: String,
    pub utility: f64,
    pub fairness: f64,
    pub on_frontier: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoOutput {
    pub metric: String,
    pub rows: Vec<ParetoRow>,
    pub topk: Option<TopkSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArgs {
    pub inputs: Vec<PathBuf>,
    /// Fairness column, e.g. `sex_ks_gsp`.
    pub metric: String,
    /// Keep only rows of this split when a `split` column exists.
    pub split: Option<String>,
    pub utility_threshold: Option<f64>,
    pub k: usize,
}

/// `run_id/lambda=…` for a `snapshots.csv` inside a run directory, else the
/// file stem.
pub fn run_label(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let parent: Vec<String> = path
        .parent()
        .map(|p| p.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    match parent.len() {
        0 => stem,
        _ if stem != "snapshots" => stem,
        1 => parent[0].clone(),
        k => format!("{}/{}", parent[k - 2], parent[k - 1]),
    }
}

fn minimized(utility_name: &str) -> bool {
    utility_name == "mae"
}

fn oriented(utility_name: &str, v: f64) -> f64 {
    if minimized(utility_name) {
        -v
    } else {
        v
    }
}

fn header_mismatch(first: &csv::StringRecord, other: &csv::StringRecord) -> Vec<String> {
    let a: Vec<&str> = first.iter().collect();
    let b: Vec<&str> = other.iter().collect();
    let mut out: Vec<String> = a.iter().filter(|c| !b.contains(c)).map(|c| format!("-{c}")).collect();
    out.extend(b.iter().filter(|c| !a.contains(c)).map(|c| format!("+{c}")));
    if out.is_empty() {
        out.push("column order differs".into());
    }
    out
}

fn parse(field: &str, what: &str, path: &Path) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse::<f64>().map(Some).map_err(|_| anyhow!("{}: non-numeric {what} '{field}'", path.display()))
}

/// Pools the snapshot logs, flags the non-dominated rows and optionally
/// summarizes the `k` fairest snapshots above a utility threshold.
pub fn pareto(args: &ParetoArgs) -> Result<ParetoOutput> {
    if args.inputs.is_empty() {
        bail!("no input files");
    }
    let mut header: Option<csv::StringRecord> = None;
    let mut rows = Vec::new();
    for path in &args.inputs {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let h = r.headers()?.clone();
        match &header {
            None => header = Some(h.clone()),
            Some(first) if *first != h => {
                bail!(
                    "{} does not share the schema of {}: {}",
                    path.display(),
                    args.inputs[0].display(),
                    header_mismatch(first, &h).join(", ")
                );
            }
            Some(_) => {}
        }
        let col = |name: &str| h.iter().position(|c| c == name);
        let need = |name: &str| col(name).ok_or_else(|| anyhow!("{} has no '{name}' column", path.display()));
        let (c_iter, c_uname, c_uval, c_metric) =
            (need("iteration")?, need("utility_name")?, need("utility_value")?, need(&args.metric)?);
        let c_split = col("split");
        let label = run_label(path);
        for rec in r.records() {
            let rec = rec?;
            if let (Some(want), Some(c)) = (&args.split, c_split) {
                if &rec[c] != want {
                    continue;
                }
            }
            let (Some(u), Some(f)) =
                (parse(&rec[c_uval], "utility", path)?, parse(&rec[c_metric], &args.metric, path)?)
            else {
                continue;
            };
            rows.push(ParetoRow {
                run_id: label.clone(),
                iteration: rec[c_iter].to_string(),
                utility_name: rec[c_uname].to_string(),
                utility: u,
                fairness: f,
                on_frontier: false,
            });
        }
    }
    if let Some(first) = rows.first() {
        if let Some(other) = rows.iter().find(|r| r.utility_name != first.utility_name) {
            bail!("mixed utilities '{}' and '{}' cannot be pooled", first.utility_name, other.utility_name);
        }
    }
    let points: Vec<ParetoPoint> =
        rows.iter().map(|r| ParetoPoint::new(oriented(&r.utility_name, r.utility), r.fairness)).collect();
    for (r, keep) in rows.iter_mut().zip(pareto_mask(&points)) {
        r.on_frontier = keep;
    }
    let topk = args.utility_threshold.map(|t| {
        let name = rows.first().map(|r| r.utility_name.as_str()).unwrap_or("");
        topk_fair_summary(&points, oriented(name, t), args.k)
    });
    Ok(ParetoOutput { metric: args.metric.clone(), rows, topk })
}

/// Path of the top-k summary written next to the frontier file.
pub fn topk_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "pareto".into());
    out.with_file_name(format!("{stem}_topk.csv"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_pareto(output: &ParetoOutput, args: &ParetoArgs, out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(["run_id", "iteration", "utility", "fairness_metric_name", "fairness_value", "on_frontier"])?;
    for r in &output.rows {
        w.write_record([
            r.run_id.clone(),
            r.iteration.clone(),
            r.utility.to_string(),
            output.metric.clone(),
            r.fairness.to_string(),
            if r.on_frontier { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.flush()?;
    if let (Some(t), Some(threshold)) = (&output.topk, args.utility_threshold) {
        let path = topk_path(out);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["fairness_metric_name", "utility_threshold", "k", "qualifying", "mean", "std"])?;
        w.write_record([
            output.metric.clone(),
            threshold.to_string(),
            args.k.to_string(),
            t.qualifying.to_string(),
            opt(t.mean()),
            opt(t.std()),
        ])?;
        w.flush()?;
    }
    Ok(())
}

pub fn cmd_pareto(args: &ParetoArgs, out: &Path) -> Result<ParetoOutput> {
    let output = pareto(args)?;
    write_pareto(&output, args, out)?;
    Ok(output)
}
