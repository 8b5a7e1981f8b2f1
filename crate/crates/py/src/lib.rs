//! Python bindings: datasets, training, model scoring, fairness metrics and
//! Pareto selection.

use std::fmt::Display;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fairpen::data::{load_csv, split_train_val, AttrKind, OutcomeKind, SamplerKind, SensitiveColumn, TabularDataset};
use fairpen::metrics::{
    auc, choose_threshold, eo_continuous, eo_discrete, ks_geo, ks_gsp, pareto_mask, sp_continuous, sp_discrete,
    topk_fair_summary, FairnessReport, Grouping, ParetoPoint, QuantileGrid,
};
use fairpen::nn::{load_checkpoint, save_checkpoint, Matrix, Mlp};
use fairpen::oracles::{geo_toy, synth_bias, SyntheticBiasSpec};
use fairpen::penalties::BetaPoint;
use fairpen::training::{
    default_geo_pair, default_gsp_pair, evaluate_snapshot, BetaKind, NoObserver, Scaling, Snapshot, Task, TrainConfig,
};
use fairpen_cli::{load_schema, ratio_toy as run_ratio_toy, thread_cap, RatioToyArgs};

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A tabular dataset with standardized features, one or more sensitive
/// attributes and an outcome.
#[pyclass(name = "Dataset", module = "fairpen_py", skip_from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: TabularDataset,
}

#[pymethods]
impl PyDataset {
    /// `levels` marks the attribute as discrete with codes `0..levels`;
    /// otherwise it is continuous in `[0, 1]`.
    #[new]
    #[pyo3(signature = (x, a, y, levels=None, outcome="binary", name="a"))]
    fn new(
        x: Vec<Vec<f64>>,
        a: Vec<f64>,
        y: Vec<f64>,
        levels: Option<usize>,
        outcome: &str,
        name: &str,
    ) -> PyResult<Self> {
        let outcome = match outcome {
            "binary" => OutcomeKind::Binary,
            "continuous" => OutcomeKind::Continuous,
            other => return Err(err(format!("outcome must be 'binary' or 'continuous', got '{other}'"))),
        };
        let kind = levels.map_or(AttrKind::Continuous, |levels| AttrKind::Discrete { levels });
        let x = Matrix::from_rows(&x).map_err(err)?;
        let col = SensitiveColumn { name: name.into(), kind, values: a };
        let inner = TabularDataset::from_arrays(x, vec![col], y, outcome).map_err(err)?;
        Ok(Self { inner })
    }

    /// Loads a CSV described by a TOML schema file.
    #[staticmethod]
    fn from_csv(data: PathBuf, schema: PathBuf) -> PyResult<Self> {
        let schema = load_schema(&schema).map_err(|e| err(format!("{e:#}")))?;
        Ok(Self { inner: load_csv(&data, &schema).map_err(err)? })
    }

    /// Train/validation split; validation features use the training scaler.
    #[pyo3(signature = (train_fraction=0.8, seed=0))]
    fn split(&self, train_fraction: f64, seed: u64) -> PyResult<(Self, Self)> {
        let (tr, va) = split_train_val(&self.inner, train_fraction, seed).map_err(err)?;
        Ok((Self { inner: tr }, Self { inner: va }))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y().to_vec()
    }

    #[getter]
    fn attributes(&self) -> Vec<String> {
        self.inner.attrs().iter().map(|a| a.name.clone()).collect()
    }

    /// Raw values of one sensitive attribute.
    fn attribute(&self, name: &str) -> PyResult<Vec<f64>> {
        self.inner
            .attrs()
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.codes.clone())
            .ok_or_else(|| err(format!("no sensitive attribute '{name}'")))
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, p={}, attributes={:?})", self.inner.n(), self.inner.p(), self.attributes())
    }
}

/// A trained scoring network.
#[pyclass(name = "Model", module = "fairpen_py", skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: Mlp,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: load_checkpoint(&path).map_err(err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_checkpoint(&self.inner, &path).map_err(err)
    }

    #[getter]
    fn input_width(&self) -> usize {
        self.inner.input_width()
    }

    /// Scores every row of `data`.
    fn predict(&self, data: &PyDataset) -> PyResult<Vec<f64>> {
        if self.inner.input_width() != data.inner.p() {
            return Err(err(format!(
                "model expects {} input features but the dataset has {}",
                self.inner.input_width(),
                data.inner.p()
            )));
        }
        Ok(self.inner.predict(data.inner.x()).map_err(err)?.into_vec())
    }

    /// Utility and fairness metrics of this model on `data`.
    fn evaluate<'py>(&self, py: Python<'py>, data: &PyDataset) -> PyResult<Bound<'py, PyDict>> {
        if self.inner.input_width() != data.inner.p() {
            return Err(err("model and dataset widths differ"));
        }
        let report = evaluate_snapshot(&self.inner, &data.inner).map_err(err)?;
        report_dict(py, &report)
    }
}

fn report_dict<'py>(py: Python<'py>, report: &FairnessReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("utility_name", report.utility.map(|u| u.name()))?;
    d.set_item("utility_value", report.utility.map(|u| u.value()))?;
    d.set_item("threshold", report.threshold)?;
    for a in &report.attributes {
        d.set_item(format!("{}_sp", a.name), a.sp)?;
        d.set_item(format!("{}_ks_gsp", a.name), a.ks_gsp)?;
        d.set_item(format!("{}_eo", a.name), a.eo)?;
        d.set_item(format!("{}_ks_geo", a.name), a.ks_geo)?;
        d.set_item(format!("{}_groups", a.name), a.groups)?;
    }
    Ok(d)
}

fn snapshot_dict<'py>(py: Python<'py>, s: &Snapshot) -> PyResult<Bound<'py, PyDict>> {
    let d = report_dict(py, &s.report)?;
    d.set_item("iteration", s.iteration)?;
    d.set_item("split", s.split.name())?;
    Ok(d)
}

/// Trains a scoring network with the GSP or GEO penalty and returns the
/// final model with its snapshot log.
#[pyfunction]
#[pyo3(signature = (
    train, valid, criterion="gsp", lam=0.5, iterations=1000, learning_rate=0.005, batch_size=100,
    disc_steps=1, eval_interval=100, seed=0, sampler="within", scaling="convex", beta="neural",
    ratio_iterations=1000, beta_point="paired", eval_train=true
))]
#[allow(clippy::too_many_arguments)]
fn train<'py>(
    py: Python<'py>,
    train: &PyDataset,
    valid: &PyDataset,
    criterion: &str,
    lam: f64,
    iterations: usize,
    learning_rate: f64,
    batch_size: usize,
    disc_steps: usize,
    eval_interval: usize,
    seed: u64,
    sampler: &str,
    scaling: &str,
    beta: &str,
    ratio_iterations: usize,
    beta_point: &str,
    eval_train: bool,
) -> PyResult<(PyModel, Vec<Bound<'py, PyDict>>)> {
    let task = match train.inner.outcome() {
        OutcomeKind::Binary => Task::BinaryClassification,
        OutcomeKind::Continuous => Task::Regression,
    };
    let cfg = TrainConfig {
        lambda: lam,
        learning_rate,
        iterations,
        disc_steps,
        ratio_iterations,
        batch_size,
        eval_interval,
        seed,
        sampler: match sampler {
            "within" => SamplerKind::WithinBatch,
            "disjoint" => SamplerKind::Disjoint,
            o => return Err(err(format!("sampler must be 'within' or 'disjoint', got '{o}'"))),
        },
        task,
        scaling: match scaling {
            "convex" => Scaling::Convex,
            "plain" => Scaling::Plain,
            o => return Err(err(format!("scaling must be 'convex' or 'plain', got '{o}'"))),
        },
        beta: match beta {
            "neural" => BetaKind::Neural,
            "empirical" => BetaKind::Empirical,
            "unit" => BetaKind::Unit,
            o => return Err(err(format!("beta must be 'neural', 'empirical' or 'unit', got '{o}'"))),
        },
        beta_point: match beta_point {
            "paired" => BetaPoint::Paired,
            "resampled" => BetaPoint::Resampled,
            o => return Err(err(format!("beta_point must be 'paired' or 'resampled', got '{o}'"))),
        },
        eval_train,
    };
    let (tr, va) = (&train.inner, &valid.inner);
    let result = match criterion {
        "gsp" => {
            let (h, d) = default_gsp_pair(tr.p(), tr.l(), task, seed).map_err(err)?;
            fairpen::training::train_gsp(tr, va, h, d, &cfg, &mut NoObserver)
        }
        "geo" => {
            let (h, d) = default_geo_pair(tr.p(), tr.l(), task, seed).map_err(err)?;
            fairpen::training::train_geo(tr, va, h, d, &cfg, &mut NoObserver)
        }
        o => return Err(err(format!("criterion must be 'gsp' or 'geo', got '{o}'"))),
    }
    .map_err(err)?;
    let snaps = result.snapshots.iter().map(|s| snapshot_dict(py, s)).collect::<PyResult<_>>()?;
    Ok((PyModel { inner: result.h }, snaps))
}

/// Synthetic data whose leading feature is shifted by `rho` between the two
/// attribute values.
#[pyfunction]
#[pyo3(signature = (n=10_000, rho=1.0, seed=0, noise=1.0, continuous_a=false))]
fn synthetic_bias(n: usize, rho: f64, seed: u64, noise: f64, continuous_a: bool) -> PyResult<PyDataset> {
    let spec = SyntheticBiasSpec { n, rho, noise, seed, continuous_a };
    Ok(PyDataset { inner: synth_bias(&spec).map_err(err)? })
}

/// Binary attribute and outcome with features tied to `A` through `rho`.
#[pyfunction]
#[pyo3(signature = (n=10_000, rho=1.0, seed=0))]
fn synthetic_geo(n: usize, rho: f64, seed: u64) -> PyResult<PyDataset> {
    Ok(PyDataset { inner: geo_toy(n, rho, seed).map_err(err)? })
}

fn grouping(values: &[f64], continuous: bool) -> PyResult<Grouping> {
    Ok(if continuous {
        Grouping::Continuous(QuantileGrid::from_sample(values).map_err(err)?)
    } else {
        Grouping::Discrete
    })
}

#[pyfunction(name = "auc")]
fn py_auc(scores: Vec<f64>, labels: Vec<f64>) -> PyResult<f64> {
    auc(&scores, &labels).map_err(err)
}

/// Threshold maximizing sensitivity plus specificity.
#[pyfunction(name = "choose_threshold")]
fn py_choose_threshold(scores: Vec<f64>, labels: Vec<f64>) -> PyResult<f64> {
    choose_threshold(&scores, &labels).map_err(err)
}

#[pyfunction(name = "ks_gsp")]
#[pyo3(signature = (scores, a, continuous=false))]
fn py_ks_gsp(scores: Vec<f64>, a: Vec<f64>, continuous: bool) -> PyResult<f64> {
    ks_gsp(&scores, &a, &grouping(&a, continuous)?).map_err(err)
}

#[pyfunction(name = "ks_geo")]
#[pyo3(signature = (scores, a, y, a_continuous=false, y_continuous=false))]
fn py_ks_geo(scores: Vec<f64>, a: Vec<f64>, y: Vec<f64>, a_continuous: bool, y_continuous: bool) -> PyResult<f64> {
    ks_geo(&scores, &a, &grouping(&a, a_continuous)?, &y, &grouping(&y, y_continuous)?).map_err(err)
}

/// Statistical-parity gap of a response (binary decisions or scores).
#[pyfunction(name = "sp")]
#[pyo3(signature = (response, a, continuous=false))]
fn py_sp(response: Vec<f64>, a: Vec<f64>, continuous: bool) -> PyResult<f64> {
    if continuous {
        sp_continuous(&response, &a, &QuantileGrid::from_sample(&a).map_err(err)?).map_err(err)
    } else {
        sp_discrete(&response, &a).map_err(err)
    }
}

/// Equalized-odds gap of a response.
#[pyfunction(name = "eo")]
#[pyo3(signature = (response, a, y, a_continuous=false, y_continuous=false))]
fn py_eo(response: Vec<f64>, a: Vec<f64>, y: Vec<f64>, a_continuous: bool, y_continuous: bool) -> PyResult<f64> {
    if a_continuous || y_continuous {
        let grid = QuantileGrid::from_sample(&a).map_err(err)?;
        eo_continuous(&response, &a, &grid, &y, &grouping(&y, y_continuous)?).map_err(err)
    } else {
        eo_discrete(&response, &a, &y).map_err(err)
    }
}

fn points(utility: &[f64], fairness: &[f64]) -> PyResult<Vec<ParetoPoint>> {
    if utility.len() != fairness.len() {
        return Err(err("utility and fairness must have the same length"));
    }
    Ok(utility.iter().zip(fairness).map(|(&u, &f)| ParetoPoint::new(u, f)).collect())
}

/// Flags the points not dominated by any other (utility up, fairness down).
#[pyfunction(name = "pareto_mask")]
fn py_pareto_mask(utility: Vec<f64>, fairness: Vec<f64>) -> PyResult<Vec<bool>> {
    Ok(pareto_mask(&points(&utility, &fairness)?))
}

/// Mean and standard deviation of the `k` lowest fairness values among
/// points with utility above the threshold.
#[pyfunction(name = "topk_fair_summary")]
#[pyo3(signature = (utility, fairness, utility_threshold, k=5))]
fn py_topk<'py>(
    py: Python<'py>,
    utility: Vec<f64>,
    fairness: Vec<f64>,
    utility_threshold: f64,
    k: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = topk_fair_summary(&points(&utility, &fairness)?, utility_threshold, k);
    let d = PyDict::new(py);
    d.set_item("qualifying", s.qualifying)?;
    d.set_item("values", s.values.clone())?;
    d.set_item("mean", s.mean())?;
    d.set_item("std", s.std())?;
    Ok(d)
}

/// Density-ratio estimates on the four-cell toy against the true ratios.
#[pyfunction]
#[pyo3(signature = (n=10_000, iterations=10_000, seed=0, replicates=1))]
fn ratio_toy<'py>(
    py: Python<'py>,
    n: usize,
    iterations: usize,
    seed: u64,
    replicates: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let args = RatioToyArgs { n, iterations, seed, replicates, ..Default::default() };
    let rows = run_ratio_toy(&args, thread_cap()).map_err(|e| err(format!("{e:#}")))?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("cell", &r.cell)?;
            d.set_item("true_ratio", r.true_ratio)?;
            d.set_item("estimated_ratio", r.estimated_ratio)?;
            d.set_item("abs_error", r.abs_error)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn fairpen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_bias, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_geo, m)?)?;
    m.add_function(wrap_pyfunction!(py_auc, m)?)?;
    m.add_function(wrap_pyfunction!(py_choose_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(py_ks_gsp, m)?)?;
    m.add_function(wrap_pyfunction!(py_ks_geo, m)?)?;
    m.add_function(wrap_pyfunction!(py_sp, m)?)?;
    m.add_function(wrap_pyfunction!(py_eo, m)?)?;
    m.add_function(wrap_pyfunction!(py_pareto_mask, m)?)?;
    m.add_function(wrap_pyfunction!(py_topk, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_toy, m)?)?;
    Ok(())
}
