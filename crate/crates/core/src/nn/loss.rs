//! Utility losses for the scoring network.

use crate::{Error, Result};

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before any log.
pub const PROB_CLAMP: f64 = 1e-7;

#[inline]
pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// `ln(clamp(p))` and its derivative with respect to `p` (zero where clamped).
#[inline]
pub(crate) fn log_clamped(p: f64) -> (f64, f64) {
    let c = clamp_probability(p);
    let d = if p > PROB_CLAMP && p < 1.0 - PROB_CLAMP { 1.0 / p } else { 0.0 };
    (c.ln(), d)
}

/// `ln(1 - clamp(p))` and its derivative with respect to `p`.
#[inline]
pub(crate) fn log1m_clamped(p: f64) -> (f64, f64) {
    let c = clamp_probability(p);
    let d = if p > PROB_CLAMP && p < 1.0 - PROB_CLAMP { -1.0 / (1.0 - p) } else { 0.0 };
    ((1.0 - c).ln(), d)
}

/// A scalar loss together with its gradient with respect to the predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Mean binary cross-entropy `-mean[y ln p + (1-y) ln(1-p)]`.
pub fn bce_loss(probabilities: &[f64], labels: &[f64]) -> Result<LossEval> {
    if probabilities.len() != labels.len() {
        return Err(Error::dim("bce_loss", probabilities.len(), labels.len()));
    }
    let n = probabilities.len() as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(probabilities.len());
    for (&p, &y) in probabilities.iter().zip(labels) {
        let (lp, dlp) = log_clamped(p);
        let (lq, dlq) = log1m_clamped(p);
        value -= y * lp + (1.0 - y) * lq;
        grad.push(-(y * dlp + (1.0 - y) * dlq) / n);
    }
    Ok(LossEval { value: value / n, grad })
}

/// Mean absolute error with subgradient `sign(pred - target) / n`, zero at ties.
pub fn mae_loss(predictions: &[f64], targets: &[f64]) -> Result<LossEval> {
    if predictions.len() != targets.len() {
        return Err(Error::dim("mae_loss", predictions.len(), targets.len()));
    }
    let n = predictions.len() as f64;
    let mut value = 0.0;
    let grad = predictions
        .iter()
        .zip(targets)
        .map(|(&h, &y)| {
            value += (y - h).abs();
            if h > y {
                1.0 / n
            } else if h < y {
                -1.0 / n
            } else {
                0.0
            }
        })
        .collect();
    Ok(LossEval { value: value / n, grad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::sigmoid;

    #[test]
    fn bce_examples() {
        assert!((bce_loss(&[0.5], &[1.0]).unwrap().value - std::f64::consts::LN_2).abs() < 1e-6);
        assert!((bce_loss(&[0.5, 0.5], &[1.0, 0.0]).unwrap().value - std::f64::consts::LN_2).abs() < 1e-6);
        let p = sigmoid(2.0);
        assert!((p - 0.880797).abs() < 1e-6);
        // -ln(sigmoid(2)) = ln(1 + e^-2)
        let expected = (1.0 + (-2.0f64).exp()).ln();
        assert!((expected - 0.126928).abs() < 1e-6);
        assert!((bce_loss(&[p], &[1.0]).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn bce_clamps_extremes() {
        let e = bce_loss(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(e.value.is_finite());
        assert!((e.value + PROB_CLAMP.ln()).abs() < 1e-9);
        assert_eq!(e.grad, vec![0.0, 0.0]);
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae_loss(&[0.3, 0.4], &[0.3, 0.4]).unwrap().value, 0.0);
        assert_eq!(mae_loss(&[0.5, 0.5], &[0.0, 1.0]).unwrap().value, 0.5);
        let e = mae_loss(&[0.9], &[0.2]).unwrap();
        assert!((e.value - 0.7).abs() < 1e-15);
        assert_eq!(e.grad, vec![1.0]);
        assert_eq!(mae_loss(&[0.4], &[0.4]).unwrap().grad, vec![0.0]);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(bce_loss(&[0.5], &[1.0, 0.0]), Err(Error::Dimension { .. })));
        assert!(matches!(mae_loss(&[0.5], &[]), Err(Error::Dimension { .. })));
    }
}
