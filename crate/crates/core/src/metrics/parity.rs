//! Ratio-based parity metrics.
//!
//! The "response" passed in is either the thresholded decision `I(h > tau)`
//! (classification) or the raw score (regression); either way the metrics
//! compare group means of it.

use super::groups::{and, check_len, masked_mean, Grouping};
use super::quantile::QuantileGrid;
use crate::{Error, Result};

fn binary_mask(values: &[f64], what: &str) -> Result<Vec<bool>> {
    if values.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Validation(format!("{what} must be binary 0/1")));
    }
    Ok(values.iter().map(|&v| v == 1.0).collect())
}

fn ratio_deviation(num: f64, den: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if den == 0.0 {
        return Err(Error::DegenerateRate(what()));
    }
    Ok((num / den - 1.0).abs())
}

/// `|E(v | A=1) / E(v | A=0) - 1|`.
pub fn sp_discrete(response: &[f64], a: &[f64]) -> Result<f64> {
    check_len("sp_discrete", response.len(), &[a.len()])?;
    let a1 = binary_mask(a, "sensitive attribute")?;
    let a0: Vec<bool> = a1.iter().map(|m| !m).collect();
    let r1 = masked_mean(response, &a1).ok_or_else(|| Error::DegenerateGroup("group A=1 is empty".into()))?;
    let r0 = masked_mean(response, &a0).ok_or_else(|| Error::DegenerateGroup("group A=0 is empty".into()))?;
    ratio_deviation(r1, r0, || "rate in group A=0 is zero".into())
}

/// `mean over q in grid of |E(v | A<=q) / E(v) - 1|`.
pub fn sp_continuous(response: &[f64], a: &[f64], grid: &QuantileGrid) -> Result<f64> {
    check_len("sp_continuous", response.len(), &[a.len()])?;
    let all = vec![true; response.len()];
    let overall = masked_mean(response, &all).expect("non-empty");
    let mut terms = Vec::with_capacity(grid.len());
    for (q, mask) in Grouping::Continuous(grid.clone()).masks(a) {
        let r = masked_mean(response, &mask).ok_or_else(|| Error::DegenerateGroup(format!("no rows with A <= {q}")))?;
        terms.push(ratio_deviation(r, overall, || "overall rate is zero".into())?);
    }
    Ok(Grouping::Continuous(grid.clone()).aggregate(&terms))
}

/// `sum over y of |E(v | A=1, Y=y) / E(v | A=0, Y=y) - 1|`.
pub fn eo_discrete(response: &[f64], a: &[f64], y: &[f64]) -> Result<f64> {
    check_len("eo_discrete", response.len(), &[a.len(), y.len()])?;
    let a1 = binary_mask(a, "sensitive attribute")?;
    let y1 = binary_mask(y, "outcome")?;
    let mut total = 0.0;
    for yv in [0.0, 1.0] {
        let in_y: Vec<bool> = y1.iter().map(|&m| (m as u8 as f64) == yv).collect();
        let c1 = and(&a1, &in_y);
        let c0: Vec<bool> = a1.iter().zip(&in_y).map(|(&a, &b)| !a && b).collect();
        let r1 =
            masked_mean(response, &c1).ok_or_else(|| Error::DegenerateRate(format!("cell (A=1, Y={yv}) is empty")))?;
        let r0 =
            masked_mean(response, &c0).ok_or_else(|| Error::DegenerateRate(format!("cell (A=0, Y={yv}) is empty")))?;
        total += ratio_deviation(r1, r0, || format!("rate in cell (A=0, Y={yv}) is zero"))?;
    }
    Ok(total)
}

/// Equalized-odds deviation for a continuous attribute.
///
/// For each outcome group `G` (`Y=y` or `Y<=b`), averages
/// `|E(v | A<=q, G) / E(v | G) - 1|` over the attribute grid; outcome groups
/// are summed (discrete `Y`) or averaged (continuous `Y`).
pub fn eo_continuous(
    response: &[f64],
    a: &[f64],
    a_grid: &QuantileGrid,
    y: &[f64],
    y_grouping: &Grouping,
) -> Result<f64> {
    check_len("eo_continuous", response.len(), &[a.len(), y.len()])?;
    let a_grouping = Grouping::Continuous(a_grid.clone());
    let a_masks = a_grouping.masks(a);
    let mut outer = Vec::new();
    for (yv, y_mask) in y_grouping.masks(y) {
        let reference = masked_mean(response, &y_mask)
            .ok_or_else(|| Error::DegenerateGroup(format!("outcome group {yv} is empty")))?;
        let mut inner = Vec::with_capacity(a_masks.len());
        for (q, a_mask) in &a_masks {
            let cell = and(a_mask, &y_mask);
            let r = masked_mean(response, &cell)
                .ok_or_else(|| Error::DegenerateGroup(format!("cell (A <= {q}, Y group {yv}) is empty")))?;
            inner.push(ratio_deviation(r, reference, || format!("rate in outcome group {yv} is zero"))?);
        }
        outer.push(a_grouping.aggregate(&inner));
    }
    Ok(y_grouping.aggregate(&outer))
}
