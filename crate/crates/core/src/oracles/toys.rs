//! Synthetic datasets with known structure.

use rand::distributions::Distribution;
use rand::Rng;
use rand_distr::{Bernoulli, StandardNormal};

use super::joint::DiscreteJoint;
use crate::data::{AttrKind, OutcomeKind, SensitiveColumn, TabularDataset};
use crate::nn::{sigmoid, Matrix};
use crate::rng::{stream, Stream};
use crate::{Error, Result};

/// Cell order of the density-ratio toy: `(a, y)` pairs.
pub const RATIO_TOY_CELLS: [(u8, u8); 4] = [(1, 1), (0, 1), (1, 0), (0, 0)];

/// `p(y | a) / p(y)` for `A ~ Bernoulli(1/2)` and `p(y=1 | a) = sigmoid(a)`,
/// in [`RATIO_TOY_CELLS`] order.
pub fn ratio_toy_truth() -> [f64; 4] {
    let p1_given = |a: f64| 1.0 / (1.0 + (-a).exp());
    let p1 = 0.5 * (p1_given(0.0) + p1_given(1.0));
    RATIO_TOY_CELLS.map(|(a, y)| {
        let pa = p1_given(a as f64);
        if y == 1 {
            pa / p1
        } else {
            (1.0 - pa) / (1.0 - p1)
        }
    })
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let b = Bernoulli::new(p).expect("probability in [0, 1]");
    if b.sample(rng) {
        1.0
    } else {
        0.0
    }
}

/// `n` draws of `A ~ Bernoulli(1/2)`, `Y | A ~ Bernoulli(sigmoid(A))` with a
/// single constant feature.
pub fn ratio_toy_dataset(n: usize, seed: u64) -> Result<TabularDataset> {
    if n == 0 {
        return Err(Error::Size("toy needs at least one row".into()));
    }
    let mut rng = stream(seed, Stream::Synthetic);
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let ai = bernoulli(0.5, &mut rng);
        a.push(ai);
        y.push(bernoulli(sigmoid(ai), &mut rng));
    }
    TabularDataset::from_arrays(
        Matrix::zeros(n, 1),
        vec![SensitiveColumn { name: "a".into(), kind: AttrKind::Discrete { levels: 2 }, values: a }],
        y,
        OutcomeKind::Binary,
    )
}

/// Parameters of [`synth_bias`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBiasSpec {
    pub n: usize,
    /// Shift of the leading feature between attribute values.
    pub rho: f64,
    /// Standard deviation of the feature noise.
    pub noise: f64,
    pub seed: u64,
    /// Draw `A ~ Uniform[0, 1]` instead of `Bernoulli(1/2)`.
    pub continuous_a: bool,
}

impl Default for SyntheticBiasSpec {
    fn default() -> Self {
        Self { n: 10_000, rho: 1.0, noise: 1.0, seed: 0, continuous_a: false }
    }
}

/// Features with tunable dependence on `A`:
///
/// ```text
/// X1 = rho * (2A - 1) + noise * Z1
/// X2 = noise * Z2
/// X3 = noise * Z3
/// Y  ~ Bernoulli(sigmoid(1.5 X1 + X2 - 0.5 X3))
/// ```
///
/// With `rho = 0` the features, and hence any score, are independent of `A`.
pub fn synth_bias(spec: &SyntheticBiasSpec) -> Result<TabularDataset> {
    if spec.n == 0 {
        return Err(Error::Size("synthetic data needs at least one row".into()));
    }
    if !(spec.noise >= 0.0 && spec.rho.is_finite()) {
        return Err(Error::Config("noise must be non-negative and rho finite".into()));
    }
    let mut rng = stream(spec.seed, Stream::Synthetic);
    let mut x = Matrix::zeros(spec.n, 3);
    let mut a = Vec::with_capacity(spec.n);
    let mut y = Vec::with_capacity(spec.n);
    for r in 0..spec.n {
        let ai = if spec.continuous_a { rng.gen::<f64>() } else { bernoulli(0.5, &mut rng) };
        let z: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let row = x.row_mut(r);
        row[0] = spec.rho * (2.0 * ai - 1.0) + spec.noise * z[0];
        row[1] = spec.noise * z[1];
        row[2] = spec.noise * z[2];
        let logit = 1.5 * row[0] + row[1] - 0.5 * row[2];
        a.push(ai);
        y.push(bernoulli(sigmoid(logit), &mut rng));
    }
    let kind = if spec.continuous_a { AttrKind::Continuous } else { AttrKind::Discrete { levels: 2 } };
    TabularDataset::from_arrays(x, vec![SensitiveColumn { name: "a".into(), kind, values: a }], y, OutcomeKind::Binary)
}

/// Binary `A` and `Y` that are dependent, with one feature tracking `Y` and
/// one leaking `A`:
///
/// ```text
/// A ~ Bernoulli(1/2),  Y | A ~ Bernoulli(sigmoid(A))
/// X1 = 2Y - 1 + Z1,    X2 = rho * (2A - 1) + Z2
/// ```
///
/// A score that uses only `X1` satisfies equalized odds exactly.
pub fn geo_toy(n: usize, rho: f64, seed: u64) -> Result<TabularDataset> {
    if n == 0 {
        return Err(Error::Size("toy needs at least one row".into()));
    }
    let mut rng = stream(seed, Stream::Synthetic);
    let mut x = Matrix::zeros(n, 2);
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for r in 0..n {
        let ai = bernoulli(0.5, &mut rng);
        let yi = bernoulli(sigmoid(ai), &mut rng);
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        x.set(r, 0, 2.0 * yi - 1.0 + z1);
        x.set(r, 1, rho * (2.0 * ai - 1.0) + z2);
        a.push(ai);
        y.push(yi);
    }
    TabularDataset::from_arrays(
        x,
        vec![SensitiveColumn { name: "a".into(), kind: AttrKind::Discrete { levels: 2 }, values: a }],
        y,
        OutcomeKind::Binary,
    )
}

/// `n` draws from a joint over `(s, a)` or `(s, a, y)`.
///
/// Returns a dataset with one constant feature, `A` coded by its support index
/// and `Y` taken from the support of the third variable (all zeros when the
/// joint has only two variables), along with the frozen score column `s`.
pub fn joint_dataset(joint: &DiscreteJoint, n: usize, seed: u64) -> Result<(TabularDataset, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Size("toy needs at least one row".into()));
    }
    if !(2..=3).contains(&joint.vars()) {
        return Err(Error::dim("joint_dataset", "2 or 3 variables", joint.vars()));
    }
    let draws = joint.sample_indices(n, &mut stream(seed, Stream::Synthetic));
    let s = draws.iter().map(|d| joint.support(0)[d[0]]).collect();
    let a = draws.iter().map(|d| d[1] as f64).collect();
    let y = draws.iter().map(|d| if joint.vars() == 3 { joint.support(2)[d[2]] } else { 0.0 }).collect();
    let ds = TabularDataset::from_arrays(
        Matrix::zeros(n, 1),
        vec![SensitiveColumn { name: "a".into(), kind: AttrKind::Discrete { levels: joint.dims()[1] }, values: a }],
        y,
        OutcomeKind::Binary,
    )?;
    Ok((ds, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_ratios_match_the_published_values() {
        let expect = [1.1877, 0.8123, 0.6995, 1.3005];
        for (got, want) in ratio_toy_truth().iter().zip(expect) {
            assert!((got - want).abs() < 5e-5, "{got} vs {want}");
        }
        assert!((sigmoid(1.0) - 0.731059).abs() < 1e-6);
        assert!((0.5 * (0.5 + sigmoid(1.0)) - 0.615529).abs() < 1e-6);
    }

    #[test]
    fn toy_is_reproducible() {
        let a = ratio_toy_dataset(50, 9).unwrap();
        let b = ratio_toy_dataset(50, 9).unwrap();
        assert_eq!(a.y(), b.y());
        assert_eq!(a.a(), b.a());
    }

    #[test]
    fn synth_bias_shapes() {
        let d = synth_bias(&SyntheticBiasSpec { n: 100, ..Default::default() }).unwrap();
        assert_eq!((d.n(), d.p(), d.l()), (100, 3, 1));
        let c = synth_bias(&SyntheticBiasSpec { n: 100, continuous_a: true, ..Default::default() }).unwrap();
        assert!(c.attrs()[0].codes.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
