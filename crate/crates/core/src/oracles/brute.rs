//! Quadratic-time reference implementations for cross-checking.

use crate::{Error, Result};

fn cdf(sample: &[f64], t: f64) -> f64 {
    sample.iter().filter(|&&v| v <= t).count() as f64 / sample.len() as f64
}

/// Sup-distance between the empirical CDF of `scores[group_mask]` and that
/// of all `scores`, checked at every observed value and every midpoint.
pub fn brute_force_ks(scores: &[f64], group_mask: &[bool]) -> Result<f64> {
    if scores.len() != group_mask.len() {
        return Err(Error::dim("brute_force_ks mask length", scores.len(), group_mask.len()));
    }
    let group: Vec<f64> = scores.iter().zip(group_mask).filter_map(|(&s, &m)| m.then_some(s)).collect();
    if group.is_empty() {
        return Err(Error::DegenerateGroup("brute_force_ks: empty group".into()));
    }
    let mut thresholds: Vec<f64> = scores.to_vec();
    for &u in scores {
        for &v in scores {
            thresholds.push(0.5 * (u + v));
        }
    }
    Ok(thresholds.iter().map(|&t| (cdf(&group, t) - cdf(scores, t)).abs()).fold(0.0, f64::max))
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
pub fn brute_force_auc(scores: &[f64], labels: &[f64]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0usize;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1.0 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0.0 {
                continue;
            }
            pairs += 1;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    (pairs > 0).then(|| wins / pairs as f64)
}

/// `true` where no other `(utility, fairness)` point weakly improves both
/// coordinates and strictly improves one.
pub fn brute_force_pareto(points: &[(f64, f64)]) -> Vec<bool> {
    points.iter().map(|&(u, f)| !points.iter().any(|&(u2, f2)| u2 >= u && f2 <= f && (u2 > u || f2 < f))).collect()
}

/// The nine decile thresholds by nearest rank: for `r = 10, ..., 90`, the
/// `k`-th smallest value where `k` is the least integer with `100 k >= r n`.
pub fn brute_force_deciles(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    (1..=9)
        .map(|d| {
            let r = 10 * d;
            let mut k = 1;
            while 100 * k < r * n {
                k += 1;
            }
            sorted[k - 1]
        })
        .collect()
}

/// Conditioning groups of one variable: one per distinct value when
/// `continuous` is false, one per decile `{v <= q}` otherwise.
fn brute_groups(v: &[f64], continuous: bool) -> Vec<Vec<bool>> {
    if continuous {
        brute_force_deciles(v).into_iter().map(|q| v.iter().map(|&x| x <= q).collect()).collect()
    } else {
        let mut levels: Vec<f64> = Vec::new();
        for &x in v {
            if !levels.contains(&x) {
                levels.push(x);
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.into_iter().map(|l| v.iter().map(|&x| x == l).collect()).collect()
    }
}

fn combine(terms: &[f64], continuous: bool) -> f64 {
    let total: f64 = terms.iter().sum();
    if continuous {
        total / terms.len() as f64
    } else {
        total
    }
}

fn rate(resp: &[f64], mask: &[bool]) -> Option<f64> {
    let hits: Vec<f64> = resp.iter().zip(mask).filter(|(_, &m)| m).map(|(&r, _)| r).collect();
    if hits.is_empty() {
        None
    } else {
        Some(hits.iter().sum::<f64>() / hits.len() as f64)
    }
}

/// KS-GSP by brute force; `None` when a group is empty.
pub fn brute_force_ks_gsp(scores: &[f64], a: &[f64], a_continuous: bool) -> Option<f64> {
    let mut terms = Vec::new();
    for g in brute_groups(a, a_continuous) {
        terms.push(brute_force_ks(scores, &g).ok()?);
    }
    Some(combine(&terms, a_continuous))
}

/// KS-GEO by brute force; `None` when a cell is empty.
pub fn brute_force_ks_geo(scores: &[f64], a: &[f64], a_continuous: bool, y: &[f64], y_continuous: bool) -> Option<f64> {
    let mut outer = Vec::new();
    for gy in brute_groups(y, y_continuous) {
        let sub: Vec<usize> = (0..scores.len()).filter(|&i| gy[i]).collect();
        if sub.is_empty() {
            return None;
        }
        let s: Vec<f64> = sub.iter().map(|&i| scores[i]).collect();
        let mut inner = Vec::new();
        for ga in brute_groups(a, a_continuous) {
            let mask: Vec<bool> = sub.iter().map(|&i| ga[i]).collect();
            inner.push(brute_force_ks(&s, &mask).ok()?);
        }
        outer.push(combine(&inner, a_continuous));
    }
    Some(combine(&outer, y_continuous))
}

/// SP by brute force: binary `A` compares group 1 to group 0, continuous `A`
/// compares `{A <= q}` to everyone. `None` on an empty group or zero rate.
pub fn brute_force_sp(resp: &[f64], a: &[f64], a_continuous: bool) -> Option<f64> {
    if a_continuous {
        let overall = rate(resp, &vec![true; resp.len()])?;
        if overall == 0.0 {
            return None;
        }
        let terms: Option<Vec<f64>> =
            brute_groups(a, true).iter().map(|g| rate(resp, g).map(|r| (r / overall - 1.0).abs())).collect();
        Some(combine(&terms?, true))
    } else {
        let r1 = rate(resp, &a.iter().map(|&x| x == 1.0).collect::<Vec<_>>())?;
        let r0 = rate(resp, &a.iter().map(|&x| x == 0.0).collect::<Vec<_>>())?;
        (r0 != 0.0).then(|| (r1 / r0 - 1.0).abs())
    }
}

/// EO by brute force, with the same conventions as [`brute_force_sp`]
/// applied within each outcome group.
pub fn brute_force_eo(resp: &[f64], a: &[f64], a_continuous: bool, y: &[f64], y_continuous: bool) -> Option<f64> {
    // the binary-A form needs both outcome classes, observed or not
    let y_groups = if !a_continuous && !y_continuous {
        [0.0, 1.0].iter().map(|&l| y.iter().map(|&v| v == l).collect()).collect()
    } else {
        brute_groups(y, y_continuous)
    };
    let mut outer = Vec::new();
    for gy in y_groups {
        let idx: Vec<usize> = (0..resp.len()).filter(|&i| gy[i]).collect();
        let r: Vec<f64> = idx.iter().map(|&i| resp[i]).collect();
        if a_continuous {
            let reference = rate(&r, &vec![true; r.len()])?;
            if reference == 0.0 {
                return None;
            }
            let mut inner = Vec::new();
            for ga in brute_groups(a, true) {
                let mask: Vec<bool> = idx.iter().map(|&i| ga[i]).collect();
                inner.push((rate(&r, &mask)? / reference - 1.0).abs());
            }
            outer.push(combine(&inner, true));
        } else {
            let sa: Vec<f64> = idx.iter().map(|&i| a[i]).collect();
            outer.push(brute_force_sp(&r, &sa, false)?);
        }
    }
    Some(combine(&outer, y_continuous))
}
