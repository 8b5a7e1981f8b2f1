use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::{Error, Result};

/// A probability table over the product of finite supports, stored row-major
/// with the last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    supports: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

impl DiscreteJoint {
    pub fn new(supports: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        let cells: usize = supports.iter().map(Vec::len).product();
        if supports.is_empty() || cells == 0 {
            return Err(Error::Validation("every variable needs a non-empty support".into()));
        }
        if probs.len() != cells {
            return Err(Error::dim("DiscreteJoint cells", cells, probs.len()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Validation("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { supports, probs })
    }

    /// Two binary variables with values `{0, 1}`; `table[i][j] = P(V1=i, V2=j)`.
    pub fn binary2(table: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(vec![vec![0.0, 1.0]; 2], table.iter().flatten().copied().collect())
    }

    /// Three binary variables; `table[i][j][k] = P(V1=i, V2=j, V3=k)`.
    pub fn binary3(table: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        Self::new(vec![vec![0.0, 1.0]; 3], table.iter().flatten().flatten().copied().collect())
    }

    pub fn vars(&self) -> usize {
        self.supports.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.supports.iter().map(Vec::len).collect()
    }

    pub fn support(&self, var: usize) -> &[f64] {
        &self.supports[var]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cells(&self) -> usize {
        self.probs.len()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.supports).fold(0, |acc, (&i, s)| acc * s.len() + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.vars()];
        for (slot, s) in idx.iter_mut().zip(&self.supports).rev() {
            *slot = flat % s.len();
            flat /= s.len();
        }
        idx
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.probs[self.flat_index(idx)]
    }

    /// The joint of the variables in `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> DiscreteJoint {
        let supports: Vec<Vec<f64>> = keep.iter().map(|&v| self.supports[v].clone()).collect();
        let mut out = DiscreteJoint { probs: vec![0.0; supports.iter().map(Vec::len).product()], supports };
        for flat in 0..self.cells() {
            let idx = self.multi_index(flat);
            let sub: Vec<usize> = keep.iter().map(|&v| idx[v]).collect();
            let k = out.flat_index(&sub);
            out.probs[k] += self.probs[flat];
        }
        out
    }

    /// `n` i.i.d. draws, each as a vector of support indices.
    pub fn sample_indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<usize>> {
        let dist = WeightedIndex::new(&self.probs).expect("validated probabilities");
        (0..n).map(|_| self.multi_index(dist.sample(rng))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn validation() {
        assert!(DiscreteJoint::binary2([[0.4, 0.1], [0.1, 0.4]]).is_ok());
        assert!(DiscreteJoint::binary2([[0.4, 0.1], [0.1, 0.3]]).is_err());
        assert!(DiscreteJoint::binary2([[0.6, -0.1], [0.1, 0.4]]).is_err());
    }

    #[test]
    fn indexing_and_marginals() {
        let j = DiscreteJoint::binary3([[[0.1, 0.2], [0.05, 0.15]], [[0.2, 0.1], [0.1, 0.1]]]).unwrap();
        for f in 0..8 {
            assert_eq!(j.flat_index(&j.multi_index(f)), f);
        }
        assert_eq!(j.prob(&[0, 1, 1]), 0.15);
        let m = j.marginal(&[2, 0]);
        assert!((m.prob(&[1, 0]) - 0.35).abs() < 1e-15);
        assert!((m.prob(&[0, 1]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn sampling_frequencies() {
        let j = DiscreteJoint::binary2([[0.4, 0.1], [0.1, 0.4]]).unwrap();
        let draws = j.sample_indices(20_000, &mut stream(3, Stream::Synthetic));
        let hits = draws.iter().filter(|d| d[0] == 0 && d[1] == 0).count() as f64 / 20_000.0;
        assert!((hits - 0.4).abs() < 0.015);
    }
}
