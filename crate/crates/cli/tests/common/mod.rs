#![allow(dead_code)]

use std::path::{Path, PathBuf};

use fairpen::data::TabularDataset;
use fairpen::oracles::{ratio_toy_dataset, synth_bias, SyntheticBiasSpec};

pub const SCHEMA: &str = r#"
[[columns]]
name = "x0"
role = "feature"
kind = "continuous"

[[columns]]
name = "x1"
role = "feature"
kind = "continuous"

[[columns]]
name = "x2"
role = "feature"
kind = "continuous"

[[columns]]
name = "a"
role = "sensitive"
kind = "categorical"
categories = ["g0", "g1"]

[[columns]]
name = "y"
role = "outcome"
kind = "binary"
"#;

pub fn write_dataset(ds: &TabularDataset, path: &Path) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["x0", "x1", "x2", "a", "y"]).unwrap();
    let codes = &ds.attrs()[0].codes;
    for r in 0..ds.n() {
        let x = ds.x_raw().row(r);
        w.write_record([
            x[0].to_string(),
            x[1].to_string(),
            x[2].to_string(),
            format!("g{}", codes[r]),
            ds.y()[r].to_string(),
        ])
        .unwrap();
    }
    w.flush().unwrap();
}

/// A biased dataset and its schema written into `dir`.
pub fn fixture(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf) {
    let ds = synth_bias(&SyntheticBiasSpec { n, rho: 1.0, seed, ..Default::default() }).unwrap();
    let data = dir.join("data.csv");
    let schema = dir.join("schema.toml");
    write_dataset(&ds, &data);
    std::fs::write(&schema, SCHEMA).unwrap();
    (data, schema)
}

/// Constant feature, two-level attribute, binary outcome.
pub fn toy_fixture(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf) {
    let ds = ratio_toy_dataset(n, seed).unwrap();
    let data = dir.join("toy.csv");
    let schema = dir.join("toy_schema.toml");
    let mut w = csv::Writer::from_path(&data).unwrap();
    w.write_record(["x", "a", "y"]).unwrap();
    for r in 0..ds.n() {
        w.write_record(["0".to_string(), ds.attrs()[0].codes[r].to_string(), ds.y()[r].to_string()]).unwrap();
    }
    w.flush().unwrap();
    std::fs::write(
        &schema,
        "[[columns]]\nname = \"x\"\nrole = \"feature\"\nkind = \"continuous\"\n\n[[columns]]\nname = \"a\"\nrole = \"sensitive\"\nkind = \"binary\"\n\n[[columns]]\nname = \"y\"\nrole = \"outcome\"\nkind = \"binary\"\n",
    )
    .unwrap();
    (data, schema)
}

pub fn config_text(data: &Path, schema: &Path, out: &Path, iterations: usize, eval_interval: usize) -> String {
    format!(
        "[data]\npath = {:?}\nschema = {:?}\n\n[train]\niterations = {iterations}\neval_interval = {eval_interval}\nratio_iterations = 200\nseed = 3\n\n[output]\ndir = {:?}\nrun_id = \"run\"\n",
        data.display().to_string(),
        schema.display().to_string(),
        out.display().to_string()
    )
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
