//! Pareto frontiers over (utility, fairness) pairs, utility maximized and
//! fairness minimized.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoPoint {
    pub utility: f64,
    pub fairness: f64,
}

impl ParetoPoint {
    pub fn new(utility: f64, fairness: f64) -> Self {
        Self { utility, fairness }
    }

    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        self.utility >= other.utility
            && self.fairness <= other.fairness
            && (self.utility > other.utility || self.fairness < other.fairness)
    }
}

/// `true` for every point no other point dominates.
pub fn pareto_mask(points: &[ParetoPoint]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[j].utility.total_cmp(&points[i].utility).then(points[i].fairness.total_cmp(&points[j].fairness))
    });
    let mut keep = vec![false; points.len()];
    // best fairness among strictly higher utilities
    let mut best_above = f64::INFINITY;
    let mut k = 0;
    while k < order.len() {
        let u = points[order[k]].utility;
        let group_min = points[order[k]].fairness;
        let mut end = k;
        while end < order.len() && points[order[end]].utility == u {
            let p = points[order[end]];
            keep[order[end]] = p.fairness == group_min && p.fairness < best_above;
            end += 1;
        }
        best_above = best_above.min(group_min);
        k = end;
    }
    keep
}

/// Non-dominated points, deduplicated and sorted by utility ascending.
pub fn pareto_frontier(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mask = pareto_mask(points);
    let mut front: Vec<ParetoPoint> = points.iter().zip(mask).filter(|(_, m)| *m).map(|(p, _)| *p).collect();
    front.sort_by(|a, b| a.utility.total_cmp(&b.utility).then(a.fairness.total_cmp(&b.fairness)));
    front.dedup();
    front
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopkSummary {
    /// Points whose utility exceeds the threshold.
    pub qualifying: usize,
    /// The (at most `k`) smallest qualifying fairness values, ascending.
    pub values: Vec<f64>,
}

impl TopkSummary {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.values.iter().sum::<f64>() / self.values.len() as f64)
    }

    /// Population standard deviation.
    pub fn std(&self) -> Option<f64> {
        let m = self.mean()?;
        let var = self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.values.len() as f64;
        Some(var.sqrt())
    }
}

/// Mean and spread of the `k` fairest points with `utility > threshold`.
pub fn topk_fair_summary(points: &[ParetoPoint], utility_threshold: f64, k: usize) -> TopkSummary {
    let mut fair: Vec<f64> = points.iter().filter(|p| p.utility > utility_threshold).map(|p| p.fairness).collect();
    let qualifying = fair.len();
    fair.sort_by(f64::total_cmp);
    fair.truncate(k);
    TopkSummary { qualifying, values: fair }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, f: f64) -> ParetoPoint {
        ParetoPoint::new(u, f)
    }

    #[test]
    fn dominance_example() {
        let front = pareto_frontier(&[p(0.5, 0.5), p(0.4, 0.4), p(0.6, 0.4)]);
        assert_eq!(front, vec![p(0.6, 0.4)]);
        assert_eq!(pareto_frontier(&[p(0.1, 0.2)]), vec![p(0.1, 0.2)]);
    }

    #[test]
    fn duplicates_collapse_and_ties_are_kept() {
        let pts = [p(0.7, 0.3), p(0.7, 0.3), p(0.8, 0.5), p(0.7, 0.4)];
        assert_eq!(pareto_mask(&pts), vec![true, true, true, false]);
        assert_eq!(pareto_frontier(&pts), vec![p(0.7, 0.3), p(0.8, 0.5)]);
    }

    #[test]
    fn topk() {
        assert!(topk_fair_summary(&[p(0.5, 0.1)], 0.6, 5).is_empty());
        let s = topk_fair_summary(&[p(0.9, 0.2); 5], 0.6, 5);
        assert_eq!((s.mean(), s.std()), (Some(0.2), Some(0.0)));
        let pts: Vec<ParetoPoint> = [0.7, 0.1, 0.5, 0.3, 0.9, 0.2, 0.4].iter().map(|&f| p(0.8, f)).collect();
        let s = topk_fair_summary(&pts, 0.6, 5);
        assert_eq!(s.qualifying, 7);
        assert_eq!(s.values, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!((s.mean().unwrap() - 0.3).abs() < 1e-15);
        assert!((s.std().unwrap() - 0.02f64.sqrt()).abs() < 1e-15);
    }
}
