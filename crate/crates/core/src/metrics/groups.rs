use super::quantile::QuantileGrid;
use crate::{Error, Result};

/// How a conditioning variable is split into groups.
#[derive(Debug, Clone, PartialEq)]
pub enum Grouping {
    /// One group per distinct observed value; group terms are summed.
    Discrete,
    /// One group `{v <= q}` per grid threshold; group terms are averaged.
    Continuous(QuantileGrid),
}

impl Grouping {
    pub(crate) fn masks(&self, values: &[f64]) -> Vec<(f64, Vec<bool>)> {
        match self {
            Grouping::Discrete => {
                let mut distinct = values.to_vec();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                distinct.into_iter().map(|d| (d, values.iter().map(|&v| v == d).collect())).collect()
            }
            Grouping::Continuous(grid) => {
                grid.values().iter().map(|&q| (q, values.iter().map(|&v| v <= q).collect())).collect()
            }
        }
    }

    /// Sum for discrete groupings, mean for continuous ones.
    pub(crate) fn aggregate(&self, terms: &[f64]) -> f64 {
        let total: f64 = terms.iter().sum();
        match self {
            Grouping::Discrete => total,
            Grouping::Continuous(_) => total / terms.len() as f64,
        }
    }
}

pub(crate) fn masked_mean(values: &[f64], mask: &[bool]) -> Option<f64> {
    let (sum, count) =
        values.iter().zip(mask).filter(|(_, &m)| m).fold((0.0, 0usize), |(s, c), (&v, _)| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub(crate) fn and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| x && y).collect()
}

pub(crate) fn check_len(context: &'static str, n: usize, others: &[usize]) -> Result<()> {
    for &m in others {
        if m != n {
            return Err(Error::dim(context, n, m));
        }
    }
    if n == 0 {
        return Err(Error::DegenerateGroup(format!("{context}: empty sample")));
    }
    Ok(())
}
