//! Kolmogorov-Smirnov fairness statistics.

use super::groups::{and, check_len, Grouping};
use crate::{Error, Result};

/// Largest gap between the empirical CDFs of two samples.
///
/// The gap only changes at observed values, so the sweep visits each
/// distinct value of the pooled sample once.
pub fn ks_distance(sample: &[f64], reference: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    let mut r = reference.to_vec();
    s.sort_by(f64::total_cmp);
    r.sort_by(f64::total_cmp);
    ks_distance_sorted(&s, &r)
}

pub(crate) fn ks_distance_sorted(s: &[f64], r: &[f64]) -> f64 {
    let (ns, nr) = (s.len() as f64, r.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0f64;
    while i < s.len() || j < r.len() {
        let v = match (s.get(i), r.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < s.len() && s[i] <= v {
            i += 1;
        }
        while j < r.len() && r[j] <= v {
            j += 1;
        }
        best = best.max((i as f64 / ns - j as f64 / nr).abs());
    }
    best
}

fn select(values: &[f64], mask: &[bool]) -> Vec<f64> {
    values.iter().zip(mask).filter(|(_, &m)| m).map(|(&v, _)| v).collect()
}

/// Per-group KS distances between the scores of `{A in group}` and all scores.
pub fn ks_gsp(scores: &[f64], a: &[f64], grouping: &Grouping) -> Result<f64> {
    check_len("ks_gsp", scores.len(), &[a.len()])?;
    let mut all = scores.to_vec();
    all.sort_by(f64::total_cmp);
    let mut terms = Vec::new();
    for (g, mask) in grouping.masks(a) {
        let mut sub = select(scores, &mask);
        if sub.is_empty() {
            return Err(Error::DegenerateGroup(format!("attribute group {g} is empty")));
        }
        sub.sort_by(f64::total_cmp);
        terms.push(ks_distance_sorted(&sub, &all));
    }
    Ok(grouping.aggregate(&terms))
}

/// KS distances between scores given `(A, Y)` and scores given `Y` alone.
pub fn ks_geo(scores: &[f64], a: &[f64], a_grouping: &Grouping, y: &[f64], y_grouping: &Grouping) -> Result<f64> {
    check_len("ks_geo", scores.len(), &[a.len(), y.len()])?;
    let a_masks = a_grouping.masks(a);
    let mut outer = Vec::new();
    for (yv, y_mask) in y_grouping.masks(y) {
        let mut reference = select(scores, &y_mask);
        if reference.is_empty() {
            return Err(Error::DegenerateGroup(format!("outcome group {yv} is empty")));
        }
        reference.sort_by(f64::total_cmp);
        let mut inner = Vec::with_capacity(a_masks.len());
        for (av, a_mask) in &a_masks {
            let mut cell = select(scores, &and(a_mask, &y_mask));
            if cell.is_empty() {
                return Err(Error::DegenerateGroup(format!(
                    "cell (attribute group {av}, outcome group {yv}) is empty"
                )));
            }
            cell.sort_by(f64::total_cmp);
            inner.push(ks_distance_sorted(&cell, &reference));
        }
        outer.push(a_grouping.aggregate(&inner));
    }
    Ok(y_grouping.aggregate(&outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::QuantileGrid;

    #[test]
    fn two_group_example() {
        let v = ks_gsp(&[0.1, 0.2, 0.8, 0.9], &[0.0, 0.0, 1.0, 1.0], &Grouping::Discrete).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_groups_give_zero() {
        let scores = [0.3, 0.7, 0.3, 0.7];
        let a = [0.0, 0.0, 1.0, 1.0];
        assert_eq!(ks_gsp(&scores, &a, &Grouping::Discrete).unwrap(), 0.0);
        let y = [0.0, 1.0, 0.0, 1.0];
        assert_eq!(ks_geo(&scores, &a, &Grouping::Discrete, &y, &Grouping::Discrete).unwrap(), 0.0);
    }

    #[test]
    fn continuous_grid_uses_cumulative_groups() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let scores = a.clone();
        let grid = QuantileGrid::from_sample(&a).unwrap();
        // group A <= q holds the q smallest scores; gap 1 - q/10
        let expect = (1..=9).map(|q| 1.0 - q as f64 / 10.0).sum::<f64>() / 9.0;
        let v = ks_gsp(&scores, &a, &Grouping::Continuous(grid)).unwrap();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn empty_cell_is_an_error() {
        let r = ks_geo(&[0.1, 0.2], &[0.0, 1.0], &Grouping::Discrete, &[0.0, 1.0], &Grouping::Discrete);
        assert!(matches!(r, Err(Error::DegenerateGroup(_))));
    }
}
