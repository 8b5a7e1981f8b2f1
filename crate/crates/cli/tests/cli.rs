mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use fairpen::nn::{save_checkpoint, Activation, ActivationLayer, DenseLayer, Layer, Matrix, Mlp};
use fairpen_cli::config::{RunConfig, RunManifest};
use fairpen_cli::evaluate::{report_header, report_record, select};
use fairpen_cli::*;

fn manifest(cfg_path: &Path, lambdas: &[f64]) -> RunManifest {
    let config = RunConfig::load(cfg_path).unwrap();
    RunManifest {
        config_path: Some(cfg_path.to_path_buf()),
        data_path: config.data.path.clone().unwrap(),
        schema_path: config.data.schema.clone().unwrap(),
        criterion: config.model.criterion,
        lambdas: lambdas.to_vec(),
        out_dir: config.output.dir.clone(),
        run_id: config.output.run_id.clone(),
        config,
    }
}

fn setup(iterations: usize, eval: usize) -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let (data, schema) = fixture(tmp.path(), 600, 1);
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, config_text(&data, &schema, &tmp.path().join("out"), iterations, eval)).unwrap();
    (tmp, cfg)
}

#[test]
fn lambda_grid_writes_one_directory_per_value() {
    let (tmp, cfg) = setup(30, 10);
    let m = manifest(&cfg, &[0.1, 0.5, 0.9]);
    let dirs = cmd_train(&m, false, 2).unwrap();
    assert_eq!(dirs.len(), 3);
    for (d, l) in dirs.iter().zip(["0.1", "0.5", "0.9"]) {
        assert_eq!(d, &tmp.path().join("out/run").join(format!("lambda={l}")));
        for f in ["snapshots.csv", "h.ckpt", "d.ckpt", "config.toml", "checkpoints/iter00000030.ckpt"] {
            assert!(d.join(f).exists(), "{}", d.join(f).display());
        }
        assert!(!d.join("beta_table.csv").exists());
        let text = String::from_utf8(read(&d.join("snapshots.csv"))).unwrap();
        assert!(text.starts_with("iteration,split,utility_name,utility_value,a_sp,a_ks_gsp,a_eo,a_ks_geo,a_groups\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 2);
    }
}

#[test]
fn reruns_are_identical_and_need_force() {
    let (_tmp, cfg) = setup(20, 10);
    let m = manifest(&cfg, &[0.5]);
    let dir = cmd_train(&m, false, 1).unwrap().remove(0);
    let first = read(&dir.join("snapshots.csv"));
    let err = cmd_train(&m, false, 1).unwrap_err().to_string();
    assert!(err.contains("--force"), "{err}");
    assert_eq!(read(&dir.join("snapshots.csv")), first);
    cmd_train(&m, true, 1).unwrap();
    assert_eq!(read(&dir.join("snapshots.csv")), first);
}

#[test]
fn geo_runs_emit_the_ratio_table() {
    let (_tmp, cfg) = setup(20, 10);
    let mut m = manifest(&cfg, &[0.5]);
    m.criterion = fairpen_cli::Criterion::Geo;
    let dir = cmd_train(&m, false, 1).unwrap().remove(0);
    let text = String::from_utf8(read(&dir.join("beta_table.csv"))).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,y,ratio");
    assert_eq!(lines.len(), 5);
}

#[test]
fn evaluating_the_final_checkpoint_reproduces_the_last_snapshot() {
    let (tmp, cfg) = setup(25, 10);
    let m = manifest(&cfg, &[0.0]);
    let dir = cmd_train(&m, false, 1).unwrap().remove(0);
    let schema = load_schema(&m.schema_path).unwrap();
    let val = select(&m.data_path, &schema, SplitArg::Validation, 0.8, 3).unwrap();
    let out = tmp.path().join("report.csv");
    let report = cmd_evaluate(&dir.join("h.ckpt"), &val, SplitArg::Validation, &out).unwrap();

    let mut r = csv::Reader::from_path(dir.join("snapshots.csv")).unwrap();
    let last = r.records().map(|x| x.unwrap()).filter(|x| &x[1] == "validation").last().unwrap();
    assert_eq!(&last[0], "25");
    let expect: Vec<String> = last.iter().skip(1).map(str::to_string).collect();
    let got = report_record(&report, "validation");
    assert_eq!(got[..got.len() - 1], expect[..]);

    let text = String::from_utf8(read(&out)).unwrap();
    let names = vec!["a".to_string()];
    assert!(text.starts_with(&report_header(&names).join(",")));
    assert_eq!(text.lines().count(), 2);
}

fn constant_checkpoint(path: &Path, p: usize) {
    let dense = DenseLayer::from_parameters(Matrix::zeros(1, p), vec![0.2]).unwrap();
    let net =
        Mlp::from_layers(p, vec![Layer::Dense(dense), Layer::Activation(ActivationLayer::new(Activation::Sigmoid))])
            .unwrap();
    save_checkpoint(&net, path).unwrap();
}

#[test]
fn evaluate_edge_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, schema_path) = fixture(tmp.path(), 200, 2);
    let schema = load_schema(&schema_path).unwrap();
    let all = select(&data, &schema, SplitArg::All, 0.8, 0).unwrap();

    let ckpt = tmp.path().join("const.ckpt");
    constant_checkpoint(&ckpt, 3);
    let rep = cmd_evaluate(&ckpt, &all, SplitArg::All, &tmp.path().join("r.csv")).unwrap();
    let a = rep.attribute("a").unwrap();
    assert_eq!((a.ks_gsp, a.ks_geo), (Some(0.0), Some(0.0)));

    let wide = tmp.path().join("wide.ckpt");
    constant_checkpoint(&wide, 5);
    let err = format!("{:#}", evaluate_checkpoint(&wide, &all).unwrap_err());
    assert!(err.contains("expects 5 input features") && err.contains("has 3"), "{err}");

    let bad = tmp.path().join("bad.ckpt");
    let text = std::fs::read_to_string(&ckpt).unwrap().replacen("FAIRPEN", "XAIRPEN", 1);
    std::fs::write(&bad, text).unwrap();
    let err = format!("{:#}", evaluate_checkpoint(&bad, &all).unwrap_err());
    assert!(err.contains("bad.ckpt"), "{err}");
}

fn snapshot_file(dir: &Path, name: &str, rows: &[(u32, f64, f64)]) -> PathBuf {
    let path = dir.join(name);
    let mut text = String::from("iteration,split,utility_name,utility_value,a_sp,a_ks_gsp,a_eo,a_ks_geo,a_groups\n");
    for (i, u, f) in rows {
        text += &format!("{i},validation,auc,{u},,{f},,,2\n");
        text += &format!("{i},train,auc,0.99,,0.0,,,2\n");
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn args(inputs: Vec<PathBuf>) -> ParetoArgs {
    ParetoArgs { inputs, metric: "a_ks_gsp".into(), split: Some("validation".into()), utility_threshold: None, k: 5 }
}

#[test]
fn pareto_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let one = snapshot_file(tmp.path(), "one.csv", &[(100, 0.7, 0.3)]);
    let out = pareto(&args(vec![one])).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert!(out.rows[0].on_frontier);

    let three = snapshot_file(tmp.path(), "three.csv", &[(1, 0.5, 0.5), (2, 0.4, 0.4), (3, 0.6, 0.4)]);
    let out = pareto(&args(vec![three])).unwrap();
    let flags: Vec<bool> = out.rows.iter().map(|r| r.on_frontier).collect();
    assert_eq!(flags, vec![false, false, true]);
}

#[test]
fn pooled_frontier_is_order_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let a = snapshot_file(tmp.path(), "a.csv", &[(1, 0.6, 0.30), (2, 0.7, 0.35), (3, 0.65, 0.5)]);
    let b = snapshot_file(tmp.path(), "b.csv", &[(1, 0.62, 0.25), (2, 0.8, 0.6), (3, 0.5, 0.1)]);
    let ab = pareto(&args(vec![a.clone(), b.clone()])).unwrap();
    let ba = pareto(&args(vec![b, a])).unwrap();
    let key = |o: &ParetoOutput| {
        let mut v: Vec<(String, String, bool)> =
            o.rows.iter().map(|r| (r.run_id.clone(), r.iteration.clone(), r.on_frontier)).collect();
        v.sort();
        v
    };
    assert_eq!(key(&ab), key(&ba));
    let pts: Vec<(f64, f64)> = ab.rows.iter().map(|r| (r.utility, r.fairness)).collect();
    let brute = fairpen::oracles::brute_force_pareto(&pts);
    assert_eq!(ab.rows.iter().map(|r| r.on_frontier).collect::<Vec<_>>(), brute);
}

#[test]
fn pareto_topk_and_schema_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let a = snapshot_file(tmp.path(), "a.csv", &[(1, 0.6, 0.30), (2, 0.7, 0.35), (3, 0.65, 0.5), (4, 0.5, 0.01)]);
    let mut ar = args(vec![a.clone()]);
    ar.utility_threshold = Some(0.55);
    ar.k = 2;
    let out_path = tmp.path().join("front.csv");
    let out = cmd_pareto(&ar, &out_path).unwrap();
    let t = out.topk.unwrap();
    assert_eq!(t.qualifying, 3);
    assert_eq!(t.values, vec![0.30, 0.35]);
    let topk = String::from_utf8(read(&tmp.path().join("front_topk.csv"))).unwrap();
    assert!(topk.starts_with("fairness_metric_name,utility_threshold,k,qualifying,mean,std\na_ks_gsp,0.55,2,3,"));
    let front = String::from_utf8(read(&out_path)).unwrap();
    assert!(front.starts_with("run_id,iteration,utility,fairness_metric_name,fairness_value,on_frontier\n"));

    let other = tmp.path().join("other.csv");
    std::fs::write(&other, "iteration,split,utility_name,utility_value,b_ks_gsp\n1,validation,auc,0.5,0.1\n").unwrap();
    let err = pareto(&args(vec![a, other])).unwrap_err().to_string();
    assert!(err.contains("-a_ks_gsp") && err.contains("+b_ks_gsp"), "{err}");
}

#[test]
fn ratio_toy_is_robust_and_reproducible() {
    let tiny = RatioToyArgs { n: 10, iterations: 50, ..Default::default() };
    let rows = ratio_toy(&tiny, 1).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.estimated_ratio.is_finite()));
    let small = RatioToyArgs { n: 500, iterations: 200, seed: 4, replicates: 2, ..Default::default() };
    assert_eq!(ratio_toy(&small, 1).unwrap(), ratio_toy(&small, 2).unwrap());
    let cells: Vec<String> = rows.iter().map(|r| r.cell.clone()).collect();
    assert_eq!(cells, ["a=1 y=1", "a=0 y=1", "a=1 y=0", "a=0 y=0"]);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairpen"))
}

#[test]
fn binary_reports_errors_with_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[train]\nlamda = 0.3\n").unwrap();
    let out = bin().args(["train", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));

    let out = bin().args(["train", "--lambda", "0.5"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no dataset"));

    let (data, schema) = fixture(tmp.path(), 100, 3);
    let out = bin()
        .args(["train", "--lambda", "1.5", "--iterations", "2", "--out"])
        .arg(tmp.path().join("o"))
        .arg("--data")
        .arg(&data)
        .arg("--schema")
        .arg(&schema)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside [0, 1]"));

    let toy = tmp.path().join("toy.csv");
    std::fs::write(&toy, "x").unwrap();
    let out = bin().args(["ratio-toy", "--n", "5", "--iterations", "3", "--out"]).arg(&toy).output().unwrap();
    assert!(!out.status.success(), "existing output must not be replaced");
    let out =
        bin().args(["ratio-toy", "--n", "5", "--iterations", "3", "--force", "--out"]).arg(&toy).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn thread_cap_reads_the_environment() {
    std::env::set_var(THREADS_ENV, "3");
    assert_eq!(thread_cap(), 3);
    std::env::set_var(THREADS_ENV, "0");
    assert!(thread_cap() >= 1);
    std::env::remove_var(THREADS_ENV);
}
