use crate::{Error, Result};

fn count_classes(labels: &[f64]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&y| y == 1.0).count();
    let neg = labels.iter().filter(|&&y| y == 0.0).count();
    if pos + neg != labels.len() {
        return Err(Error::Validation("labels must be 0 or 1".into()));
    }
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric("both classes must be present".into()));
    }
    Ok((pos, neg))
}

/// Indices of `scores` in ascending order (ties keep input order).
pub(crate) fn argsort(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    idx
}

/// Area under the ROC curve via the Mann-Whitney rank sum with midranks.
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::dim("auc", scores.len(), labels.len()));
    }
    let (pos, neg) = count_classes(labels)?;
    let order = argsort(scores);
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid = (i + j + 2) as f64 / 2.0;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k] == 1.0).count();
        rank_sum += mid * tied_pos as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Threshold maximizing Youden's J (TPR - FPR) for the rule `score > tau`.
///
/// Candidates are `-inf`, the midpoints between consecutive distinct scores,
/// and `+inf`; the smallest maximizer wins.
pub fn choose_threshold(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::dim("choose_threshold", scores.len(), labels.len()));
    }
    let (pos, neg) = count_classes(labels)?;
    let order = argsort(scores);
    // Start at tau = -inf: everything predicted positive.
    let (mut tp, mut fp) = (pos, neg);
    let j = |tp: usize, fp: usize| tp as f64 / pos as f64 - fp as f64 / neg as f64;
    let mut best_tau = f64::NEG_INFINITY;
    let mut best_j = j(tp, fp);
    let mut i = 0;
    while i < order.len() {
        let v = scores[order[i]];
        while i < order.len() && scores[order[i]] == v {
            if labels[order[i]] == 1.0 {
                tp -= 1;
            } else {
                fp -= 1;
            }
            i += 1;
        }
        let tau = if i < order.len() { 0.5 * (v + scores[order[i]]) } else { f64::INFINITY };
        let cand = j(tp, fp);
        if cand > best_j {
            best_j = cand;
            best_tau = tau;
        }
    }
    Ok(best_tau)
}

/// `I(score > tau)` as 0/1.
pub fn binarize(scores: &[f64], tau: f64) -> Vec<f64> {
    scores.iter().map(|&s| if s > tau { 1.0 } else { 0.0 }).collect()
}

pub fn mae(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::dim("mae", predictions.len(), targets.len()));
    }
    if predictions.is_empty() {
        return Err(Error::UndefinedMetric("mae of an empty sample".into()));
    }
    Ok(predictions.iter().zip(targets).map(|(p, t)| (p - t).abs()).sum::<f64>() / predictions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.1, 0.9], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(auc(&[0.9, 0.1], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(auc(&[0.5, 0.5, 0.7], &[0.0, 1.0, 1.0]).unwrap(), 0.75);
        assert!(matches!(auc(&[0.1, 0.2], &[1.0, 1.0]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(choose_threshold(&[0.1, 0.9], &[0.0, 1.0]).unwrap(), 0.5);
        // no threshold beats chance: the -inf sentinel wins the tie
        assert_eq!(choose_threshold(&[0.5, 0.5], &[0.0, 1.0]).unwrap(), f64::NEG_INFINITY);
        assert_eq!(choose_threshold(&[0.1, 0.2, 0.6, 0.8], &[0.0, 0.0, 1.0, 1.0]).unwrap(), 0.4);
        assert!(choose_threshold(&[0.1], &[0.0]).is_err());
    }

    #[test]
    fn threshold_prefers_smallest_maximizer() {
        // J = 0.5 at tau = 0.15 and again at tau = 0.35
        let tau = choose_threshold(&[0.1, 0.2, 0.3, 0.4], &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((tau - 0.15).abs() < 1e-15);
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[0.3, 0.1], &[0.3, 0.1]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!((mae(&[0.2, 0.4], &[0.5, 0.0]).unwrap() - 0.35).abs() < 1e-15);
        assert!(mae(&[0.2], &[]).is_err());
    }
}
