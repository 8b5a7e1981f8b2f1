//! Density-ratio weights `beta(a, y) = p(a, y) / (p(a) p(y))`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::data::{minibatch_construct, OutcomeKind, SamplerKind, TabularDataset};
use crate::nn::{clamp_probability, log1m_clamped, log_clamped, Activation, Direction, Matrix, Mlp, Mode, Sgd};
use crate::rng::{stream, Stream};
use crate::{Error, Result};

/// A classifier `D_beta(a, y)` whose odds estimate the density ratio.
#[derive(Debug, Clone)]
pub struct DensityRatioEstimator {
    net: Mlp,
    frozen: bool,
}

impl DensityRatioEstimator {
    /// Wraps an untrained network taking `l + 1` inputs.
    pub fn new(net: Mlp) -> Result<Self> {
        if net.output_width() != 1 {
            return Err(Error::dim("DensityRatioEstimator output width", 1, net.output_width()));
        }
        Ok(Self { net, frozen: false })
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn freeze(&mut self) {
        self.net.clear_caches();
        self.frozen = true;
    }

    /// `D_beta / (1 - D_beta)` for each `(a_i, y_i)` row.
    pub fn ratios(&self, a: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
        let input = a.hcat(&Matrix::column(y.to_vec()))?;
        Ok(self.net.predict(&input)?.as_slice().iter().map(|&p| odds(p)).collect())
    }
}

fn odds(p: f64) -> f64 {
    let c = clamp_probability(p);
    c / (1.0 - c)
}

/// `beta(a, y)` for one encoded attribute row.
pub fn beta_value(estimator: &DensityRatioEstimator, a: &[f64], y: f64) -> Result<f64> {
    let row = Matrix::from_vec(1, a.len(), a.to_vec())?;
    Ok(estimator.ratios(&row, &[y])?[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioConfig {
    /// Pre-training iterations `L`.
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub hidden: Vec<usize>,
    pub sampler: SamplerKind,
    pub seed: u64,
}

impl Default for RatioConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            batch_size: 100,
            learning_rate: 0.005,
            hidden: vec![64, 64],
            sampler: SamplerKind::WithinBatch,
            seed: 0,
        }
    }
}

/// Trains `D_beta` to tell real `(a, y)` pairs from `(a', y)` pairs with `a'`
/// resampled, ascending `mean[log D(a,y) + log(1 - D(a',y))]`, and returns it
/// frozen.
pub fn pretrain_density_ratio(dataset: &TabularDataset, config: &RatioConfig) -> Result<DensityRatioEstimator> {
    if config.iterations == 0 {
        return Err(Error::Config("density-ratio iterations must be at least 1".into()));
    }
    let opt = Sgd::new(config.learning_rate)?;
    let mut init = stream(config.seed, Stream::RatioInit);
    let net = Mlp::feed_forward(dataset.l() + 1, &config.hidden, false, Activation::Sigmoid, &mut init)?;
    let mut est = DensityRatioEstimator::new(net)?;
    let mut batch_rng = stream(config.seed, Stream::RatioBatching);
    let mut sampler_rng = stream(config.seed, Stream::RatioSampler);
    for _ in 0..config.iterations {
        let b = minibatch_construct(dataset, config.batch_size, config.sampler, &mut batch_rng, &mut sampler_rng)?;
        let y = Matrix::column(b.y.clone());
        let real = b.a.hcat(&y)?;
        let fake = b.a_prime.hcat(&y)?;
        let n = b.len();
        let input = stack(&real, &fake);
        let p = est.net.forward(&input, Mode::Train)?;
        let mut upstream = Matrix::zeros(2 * n, 1);
        for i in 0..n {
            upstream.set(i, 0, log_clamped(p.get(i, 0)).1 / n as f64);
            upstream.set(n + i, 0, log1m_clamped(p.get(n + i, 0)).1 / n as f64);
        }
        est.net.backward(&upstream)?;
        est.net.sgd_step(&opt, Direction::Maximize);
    }
    est.freeze();
    Ok(est)
}

pub(crate) fn stack(top: &Matrix, bottom: &Matrix) -> Matrix {
    let mut values = top.as_slice().to_vec();
    values.extend_from_slice(bottom.as_slice());
    Matrix::from_vec(top.rows() + bottom.rows(), top.cols(), values).expect("equal widths")
}

/// One cell of an empirical ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfRatioEntry {
    /// Attribute codes, one per sensitive attribute.
    pub codes: Vec<f64>,
    /// The encoded attribute row of the cell.
    pub a_row: Vec<f64>,
    pub y: f64,
    pub ratio: f64,
    pub count: usize,
}

/// Plug-in ratios `p(a,y) / (p(a) p(y))` from empirical counts. Cells never
/// observed get weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfRatioTable {
    attr_names: Vec<String>,
    entries: Vec<PmfRatioEntry>,
    lookup: BTreeMap<Vec<u64>, f64>,
}

fn key(a: &[f64], y: f64) -> Vec<u64> {
    a.iter().chain(std::iter::once(&y)).map(|v| v.to_bits()).collect()
}

pub fn empirical_pmf_ratio(dataset: &TabularDataset) -> Result<PmfRatioTable> {
    if dataset.outcome() != OutcomeKind::Binary || !dataset.all_discrete() {
        return Err(Error::Validation(
            "empirical ratios need discrete sensitive attributes and a binary outcome".into(),
        ));
    }
    let n = dataset.n();
    let mut joint: BTreeMap<Vec<u64>, (usize, usize)> = BTreeMap::new();
    let mut a_count: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut y_count = [0usize; 2];
    for i in 0..n {
        let row = dataset.a().row(i);
        let y = dataset.y()[i];
        joint.entry(key(row, y)).or_insert((i, 0)).1 += 1;
        *a_count.entry(key(row, 0.0)).or_insert(0) += 1;
        y_count[y as usize] += 1;
    }
    let nf = n as f64;
    let mut entries = Vec::new();
    let mut lookup = BTreeMap::new();
    for (k, (first, c)) in &joint {
        let row = dataset.a().row(*first);
        let y = dataset.y()[*first];
        let p_ay = *c as f64 / nf;
        let p_a = a_count[&key(row, 0.0)] as f64 / nf;
        let p_y = y_count[y as usize] as f64 / nf;
        let ratio = p_ay / (p_a * p_y);
        lookup.insert(k.clone(), ratio);
        entries.push(PmfRatioEntry {
            codes: dataset.attrs().iter().map(|attr| attr.codes[*first]).collect(),
            a_row: row.to_vec(),
            y,
            ratio,
            count: *c,
        });
    }
    entries.sort_by(|l, r| l.codes.partial_cmp(&r.codes).unwrap().then(l.y.total_cmp(&r.y)));
    Ok(PmfRatioTable { attr_names: dataset.attrs().iter().map(|a| a.name.clone()).collect(), entries, lookup })
}

impl PmfRatioTable {
    pub fn entries(&self) -> &[PmfRatioEntry] {
        &self.entries
    }

    /// The ratio at an encoded attribute row and outcome; 1 if unseen.
    pub fn ratio(&self, a: &[f64], y: f64) -> f64 {
        self.lookup.get(&key(a, y)).copied().unwrap_or(1.0)
    }

    pub fn ratios(&self, a: &Matrix, y: &[f64]) -> Vec<f64> {
        (0..a.rows()).map(|i| self.ratio(a.row(i), y[i])).collect()
    }

    /// The same cells with ratios taken from `source`.
    pub fn reweighted(&self, source: &BetaSource) -> Result<PmfRatioTable> {
        if self.entries.is_empty() {
            return Ok(self.clone());
        }
        let rows: Vec<Vec<f64>> = self.entries.iter().map(|e| e.a_row.clone()).collect();
        let y: Vec<f64> = self.entries.iter().map(|e| e.y).collect();
        let w = source.weights(&Matrix::from_rows(&rows)?, &y)?;
        let mut out = self.clone();
        for (e, r) in out.entries.iter_mut().zip(w) {
            e.ratio = r;
            out.lookup.insert(key(&e.a_row, e.y), r);
        }
        Ok(out)
    }

    /// CSV with one column per attribute code, then `y` and `ratio`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.attr_names.clone();
        header.push("y".into());
        header.push("ratio".into());
        w.write_record(&header)?;
        for e in &self.entries {
            let mut rec: Vec<String> = e.codes.iter().map(|c| c.to_string()).collect();
            rec.push(e.y.to_string());
            rec.push(e.ratio.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Weights applied to the resampled term of the GEO penalty.
#[derive(Debug, Clone)]
pub enum BetaSource {
    /// All weights 1.
    Unit,
    Table(PmfRatioTable),
    Neural(DensityRatioEstimator),
}

impl BetaSource {
    pub fn weights(&self, a: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
        if a.rows() != y.len() {
            return Err(Error::dim("beta weights", a.rows(), y.len()));
        }
        match self {
            BetaSource::Unit => Ok(vec![1.0; y.len()]),
            BetaSource::Table(t) => Ok(t.ratios(a, y)),
            BetaSource::Neural(est) => {
                if !est.is_frozen() {
                    return Err(Error::State("density-ratio estimator must be frozen before use".into()));
                }
                est.ratios(a, y)
            }
        }
    }
}
