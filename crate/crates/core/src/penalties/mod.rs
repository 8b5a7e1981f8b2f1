//! Adversarial fairness penalties.
//!
//! Both penalties compare real pairs `(s_i, a_i)` against pairs whose attribute
//! was resampled, `(s_i, a'_i)`. The discriminator ascends the penalty; the
//! scoring network descends it through `s`.

mod discriminator;
mod ratio;

use crate::nn::{log1m_clamped, log_clamped, Matrix, Mlp, Mode};
use crate::oracles::DiscreteJoint;
use crate::{Error, Result};

pub use discriminator::{GeoDiscriminator, GspDiscriminator};
pub use ratio::{
    beta_value, empirical_pmf_ratio, pretrain_density_ratio, BetaSource, DensityRatioEstimator, PmfRatioEntry,
    PmfRatioTable, RatioConfig,
};

/// Penalty value and its gradient with respect to the scores.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyEval {
    pub value: f64,
    pub grad_s: Vec<f64>,
}

/// Which attribute the GEO weight is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaPoint {
    /// `beta(a_i, y_i)`, the row's own attribute.
    #[default]
    Paired,
    /// `beta(a'_i, y_i)`, the resampled attribute.
    Resampled,
}

/// Runs real and resampled rows through `net` as one batch and backpropagates
/// `mean[log D(real)] + mean[w * log(1 - D(fake))]`.
///
/// Parameter gradients accumulate in `net`; the returned gradient is with
/// respect to column 0 of the input (the score).
fn two_sample_penalty(net: &mut Mlp, real: &Matrix, fake: &Matrix, weights: &[f64], mode: Mode) -> Result<PenaltyEval> {
    let n = real.rows();
    if fake.rows() != n || weights.len() != n {
        return Err(Error::dim("penalty rows", n, fake.rows()));
    }
    if n == 0 {
        return Err(Error::Size("penalty needs at least one row".into()));
    }
    let nf = n as f64;
    let input = ratio::stack(real, fake);
    let p = net.forward(&input, mode)?;
    let mut value = 0.0;
    let mut upstream = Matrix::zeros(2 * n, 1);
    for i in 0..n {
        let (lr, dr) = log_clamped(p.get(i, 0));
        let (lf, df) = log1m_clamped(p.get(n + i, 0));
        value += lr + weights[i] * lf;
        upstream.set(i, 0, dr / nf);
        upstream.set(n + i, 0, weights[i] * df / nf);
    }
    let grad_s = if mode == Mode::Train {
        let g = net.backward(&upstream)?;
        (0..n).map(|i| g.get(i, 0) + g.get(n + i, 0)).collect()
    } else {
        Vec::new()
    };
    Ok(PenaltyEval { value: value / nf, grad_s })
}

/// `mean[log D(s, a) + log(1 - D(s, a'))]`.
///
/// In train mode, gradients of the value accumulate in `d`'s buffers and the
/// gradient with respect to `s` is returned; in inference mode only the value
/// is computed.
pub fn gsp_penalty(
    d: &mut GspDiscriminator,
    s: &[f64],
    a: &Matrix,
    a_prime: &Matrix,
    mode: Mode,
) -> Result<PenaltyEval> {
    if a.rows() != s.len() || a_prime.rows() != s.len() {
        return Err(Error::dim("gsp_penalty rows", s.len(), a.rows().max(a_prime.rows())));
    }
    let real = discriminator::gsp_input(s, a)?;
    let fake = discriminator::gsp_input(s, a_prime)?;
    two_sample_penalty(&mut d.net, &real, &fake, &vec![1.0; s.len()], mode)
}

/// `mean[log D(s, a, y) + beta * log(1 - D(s, a', y))]` with `beta` frozen.
#[allow(clippy::too_many_arguments)]
pub fn geo_penalty(
    d: &mut GeoDiscriminator,
    beta: &BetaSource,
    point: BetaPoint,
    s: &[f64],
    a: &Matrix,
    y: &[f64],
    a_prime: &Matrix,
    mode: Mode,
) -> Result<PenaltyEval> {
    if a.rows() != s.len() || a_prime.rows() != s.len() || y.len() != s.len() {
        return Err(Error::dim("geo_penalty rows", s.len(), a.rows().max(a_prime.rows()).max(y.len())));
    }
    let weights = match point {
        BetaPoint::Paired => beta.weights(a, y)?,
        BetaPoint::Resampled => beta.weights(a_prime, y)?,
    };
    let real = discriminator::geo_input(s, a, y)?;
    let fake = discriminator::geo_input(s, a_prime, y)?;
    two_sample_penalty(&mut d.net, &real, &fake, &weights, mode)
}

/// Optimal GSP discriminator `p(s,a) / (p(s,a) + p(s) p(a))` over a joint of
/// `(s, a)`, aligned with `joint.probs()`. Cells where both terms vanish are
/// `NaN`.
pub fn optimal_gsp_discriminator_oracle(joint: &DiscreteJoint) -> Result<Vec<f64>> {
    if joint.vars() != 2 {
        return Err(Error::Validation("expected a joint over (s, a)".into()));
    }
    let p_s = joint.marginal(&[0]);
    let p_a = joint.marginal(&[1]);
    Ok((0..joint.cells())
        .map(|flat| {
            let idx = joint.multi_index(flat);
            let real = joint.probs()[flat];
            let indep = p_s.probs()[idx[0]] * p_a.probs()[idx[1]];
            if real + indep > 0.0 {
                real / (real + indep)
            } else {
                f64::NAN
            }
        })
        .collect())
}
