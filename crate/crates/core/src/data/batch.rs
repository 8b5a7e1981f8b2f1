//! Minibatch construction with a simple random sampler of `A`.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::dataset::TabularDataset;
use crate::nn::Matrix;
use crate::{Error, Result};

/// Where the resampled attributes `a'` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerKind {
    /// A random permutation of the batch's own `a` rows.
    #[default]
    WithinBatch,
    /// A second draw of `n_b` rows disjoint from the batch.
    Disjoint,
}

#[derive(Debug, Clone)]
pub struct Minibatch {
    /// Dataset rows backing `(x, a, y)`.
    pub indices: Vec<usize>,
    /// Dataset rows backing `a_prime`.
    pub prime_indices: Vec<usize>,
    pub x: Matrix,
    pub a: Matrix,
    pub y: Vec<f64>,
    pub a_prime: Matrix,
}

impl Minibatch {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn y_column(&self) -> Matrix {
        Matrix::column(self.y.clone())
    }
}

/// Draws `(x, a, y)` rows without replacement using `batch_rng`, then pairs
/// them with resampled attributes drawn from `sampler_rng`.
///
/// The two generators are separate so that the batch rows do not depend on
/// the sampler mode.
pub fn minibatch_construct<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    dataset: &TabularDataset,
    n_b: usize,
    sampler: SamplerKind,
    batch_rng: &mut R1,
    sampler_rng: &mut R2,
) -> Result<Minibatch> {
    let n = dataset.n();
    if n_b == 0 {
        return Err(Error::Size("batch size must be at least 1".into()));
    }
    if n < n_b {
        return Err(Error::Size(format!("batch size {n_b} exceeds dataset size {n}")));
    }
    if sampler == SamplerKind::Disjoint && n < 2 * n_b {
        return Err(Error::Size(format!("disjoint sampling needs at least {} rows, dataset has {n}", 2 * n_b)));
    }
    let indices = index::sample(batch_rng, n, n_b).into_vec();
    let prime_indices = match sampler {
        SamplerKind::WithinBatch => {
            let mut perm = indices.clone();
            perm.shuffle(sampler_rng);
            perm
        }
        SamplerKind::Disjoint => {
            let mut taken = vec![false; n];
            indices.iter().for_each(|&i| taken[i] = true);
            let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            index::sample(sampler_rng, rest.len(), n_b).into_iter().map(|k| rest[k]).collect()
        }
    };
    Ok(Minibatch {
        x: dataset.x().select_rows(&indices),
        a: dataset.a().select_rows(&indices),
        y: indices.iter().map(|&i| dataset.y()[i]).collect(),
        a_prime: dataset.a().select_rows(&prime_indices),
        indices,
        prime_indices,
    })
}

/// The empirical distribution of the encoded `A` rows.
#[derive(Debug, Clone)]
pub struct EmpiricalMarginal<'a> {
    a: &'a Matrix,
}

pub fn marginal_of_a(dataset: &TabularDataset) -> EmpiricalMarginal<'_> {
    EmpiricalMarginal { a: dataset.a() }
}

impl<'a> EmpiricalMarginal<'a> {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a [f64] {
        self.a.row(rng.gen_range(0..self.a.rows()))
    }

    /// `k` i.i.d. rows.
    pub fn draw_rows<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Matrix {
        let idx: Vec<usize> = (0..k).map(|_| rng.gen_range(0..self.a.rows())).collect();
        self.a.select_rows(&idx)
    }
}
