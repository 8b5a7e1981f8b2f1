//! Closed-form optimal discriminators.

use super::joint::DiscreteJoint;
use crate::{Error, Result};

/// Optimal GEO discriminator over a joint of `(s, a, y)` when the resampled
/// term is weighted by `beta(a', y)`:
///
/// `D*(s,a,y) = p(s|a,y) / (p(s|a,y) + beta(a,y) p(s|y) p(a) p(y) / p(a,y))`.
///
/// `beta[i][j]` is the weight at the `i`-th value of `a` and `j`-th value of
/// `y`. The result is aligned with `joint.probs()`; cells with `p(a,y) = 0`
/// are `NaN`.
pub fn exact_geo_discriminator_oracle(joint: &DiscreteJoint, beta: &[Vec<f64>]) -> Result<Vec<f64>> {
    check(joint, beta)?;
    let dims = joint.dims();
    let mut out = Vec::with_capacity(joint.cells());
    for flat in 0..joint.cells() {
        let idx = joint.multi_index(flat);
        let (s, a, y) = (idx[0], idx[1], idx[2]);
        let p_ay: f64 = (0..dims[0]).map(|k| joint.prob(&[k, a, y])).sum();
        let p_sy: f64 = (0..dims[1]).map(|k| joint.prob(&[s, k, y])).sum();
        let p_y: f64 =
            (0..dims[0]).flat_map(|k| (0..dims[1]).map(move |m| (k, m))).map(|(k, m)| joint.prob(&[k, m, y])).sum();
        let p_a: f64 =
            (0..dims[0]).flat_map(|k| (0..dims[2]).map(move |m| (k, m))).map(|(k, m)| joint.prob(&[k, a, m])).sum();
        if p_ay == 0.0 {
            out.push(f64::NAN);
            continue;
        }
        let p_s_given_ay = joint.prob(&idx) / p_ay;
        let p_s_given_y = p_sy / p_y;
        let weight = beta[a][y] * p_a * p_y / p_ay;
        out.push(p_s_given_ay / (p_s_given_ay + weight * p_s_given_y));
    }
    Ok(out)
}

/// Optimal GEO discriminator when the resampled term of row `i` is weighted
/// by `beta(a_i, y_i)`, the attribute the row actually carried:
///
/// `D*(s,a,y) = p(s,a,y) / (p(s,a,y) + p(a) sum_b beta(b,y) p(s,b,y))`.
pub fn paired_geo_discriminator_oracle(joint: &DiscreteJoint, beta: &[Vec<f64>]) -> Result<Vec<f64>> {
    check(joint, beta)?;
    let dims = joint.dims();
    let mut out = Vec::with_capacity(joint.cells());
    for flat in 0..joint.cells() {
        let idx = joint.multi_index(flat);
        let (s, a, y) = (idx[0], idx[1], idx[2]);
        let mut p_a = 0.0;
        for k in 0..dims[0] {
            for m in 0..dims[2] {
                p_a += joint.prob(&[k, a, m]);
            }
        }
        let fake: f64 = (0..dims[1]).map(|b| beta[b][y] * joint.prob(&[s, b, y])).sum::<f64>() * p_a;
        let real = joint.prob(&idx);
        out.push(if real + fake > 0.0 { real / (real + fake) } else { f64::NAN });
    }
    Ok(out)
}

fn check(joint: &DiscreteJoint, beta: &[Vec<f64>]) -> Result<()> {
    if joint.vars() != 3 {
        return Err(Error::Validation("expected a joint over (s, a, y)".into()));
    }
    let dims = joint.dims();
    if beta.len() != dims[1] || beta.iter().any(|r| r.len() != dims[2]) {
        return Err(Error::dim("beta table shape", format!("{}x{}", dims[1], dims[2]), format!("{}x?", beta.len())));
    }
    if beta.iter().flatten().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(Error::Validation("beta must be positive and finite".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `A` and `Y` dependent, `s` depends on `y` only.
    fn conditionally_independent() -> DiscreteJoint {
        let p_ay = [[0.3, 0.2], [0.1, 0.4]];
        let p_s1_given_y = [0.2, 0.7];
        let mut t = [[[0.0; 2]; 2]; 2];
        for s in 0..2 {
            for a in 0..2 {
                for y in 0..2 {
                    let ps = if s == 1 { p_s1_given_y[y] } else { 1.0 - p_s1_given_y[y] };
                    t[s][a][y] = ps * p_ay[a][y];
                }
            }
        }
        DiscreteJoint::binary3(t).unwrap()
    }

    #[test]
    fn exact_ratio_and_conditional_independence_give_one_half() {
        let j = conditionally_independent();
        let beta = vec![vec![0.3 / (0.5 * 0.4), 0.2 / (0.5 * 0.6)], vec![0.1 / (0.5 * 0.4), 0.4 / (0.5 * 0.6)]];
        for d in exact_geo_discriminator_oracle(&j, &beta).unwrap() {
            assert!((d - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_weights_on_independent_ay_reduce_to_conditional_gsp_optimum() {
        // A independent of Y, s depends on (a, y)
        let mut t = [[[0.0; 2]; 2]; 2];
        let p_s1 = [[0.1, 0.6], [0.5, 0.9]];
        for s in 0..2 {
            for a in 0..2 {
                for y in 0..2 {
                    let ps = if s == 1 { p_s1[a][y] } else { 1.0 - p_s1[a][y] };
                    t[s][a][y] = ps * 0.25;
                }
            }
        }
        let j = DiscreteJoint::binary3(t).unwrap();
        let d = exact_geo_discriminator_oracle(&j, &[vec![1.0; 2], vec![1.0; 2]]).unwrap();
        for flat in 0..8 {
            let idx = j.multi_index(flat);
            let (s, a, y) = (idx[0], idx[1], idx[2]);
            let p_say = t[s][a][y] / 0.25;
            let p_sy = (t[s][0][y] + t[s][1][y]) / 0.5;
            assert!((d[flat] - p_say / (p_say + p_sy)).abs() < 1e-12);
        }
    }

    #[test]
    fn paired_and_resampled_agree_under_unit_weights() {
        let j = conditionally_independent();
        let ones = vec![vec![1.0; 2]; 2];
        let a = exact_geo_discriminator_oracle(&j, &ones).unwrap();
        let b = paired_geo_discriminator_oracle(&j, &ones).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
