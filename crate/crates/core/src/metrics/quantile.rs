use crate::{Error, Result};

/// Nearest-rank quantile: the value at 1-based position `ceil(r * n / 100)`
/// of the sorted sample.
pub fn nearest_rank(sorted: &[f64], percent: usize) -> f64 {
    let n = sorted.len();
    let k = (percent * n).div_ceil(100).max(1);
    sorted[k - 1]
}

/// Thresholds `{q_10, q_20, ..., q_90}` of a continuous variable.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileGrid {
    values: Vec<f64>,
}

impl QuantileGrid {
    pub const PERCENTS: [usize; 9] = [10, 20, 30, 40, 50, 60, 70, 80, 90];

    pub fn from_sample(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::DegenerateGroup("quantiles of an empty sample".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values: Self::PERCENTS.iter().map(|&r| nearest_rank(&sorted, r)).collect() })
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("quantile grid must be nondecreasing".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_values_give_first_nine() {
        let sample: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        let g = QuantileGrid::from_sample(&sample).unwrap();
        assert_eq!(g.values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn small_samples_round_up() {
        // n = 3: ceil(0.3) = 1, ceil(1.5) = 2, ceil(2.7) = 3
        let g = QuantileGrid::from_sample(&[5.0, 7.0, 6.0]).unwrap();
        assert_eq!(g.values()[0], 5.0);
        assert_eq!(g.values()[4], 6.0);
        assert_eq!(g.values()[8], 7.0);
        assert!(QuantileGrid::from_values(vec![0.2, 0.1]).is_err());
    }
}
