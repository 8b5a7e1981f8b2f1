use super::auc::{auc, binarize, choose_threshold, mae};
use super::groups::Grouping;
use super::ks::{ks_geo, ks_gsp};
use super::parity::{eo_continuous, eo_discrete, sp_continuous, sp_discrete};
use super::quantile::QuantileGrid;
use crate::data::{AttrKind, OutcomeKind, SensitiveAttr};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Utility {
    Auc(f64),
    Mae(f64),
}

impl Utility {
    pub fn name(&self) -> &'static str {
        match self {
            Utility::Auc(_) => "auc",
            Utility::Mae(_) => "mae",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Utility::Auc(v) | Utility::Mae(v) => v,
        }
    }

    /// Larger is better: AUC as is, MAE negated.
    pub fn maximized(&self) -> f64 {
        match *self {
            Utility::Auc(v) => v,
            Utility::Mae(v) => -v,
        }
    }
}

/// Fairness metrics for one sensitive attribute. `None` marks a metric that
/// does not apply or is undefined on this sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AttrFairness {
    pub name: String,
    /// Number of conditioning groups behind the summed/averaged values.
    pub groups: usize,
    pub sp: Option<f64>,
    pub ks_gsp: Option<f64>,
    pub eo: Option<f64>,
    pub ks_geo: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    /// `None` when the split holds a single class.
    pub utility: Option<Utility>,
    /// Decision threshold behind SP/EO for classification.
    pub threshold: Option<f64>,
    pub attributes: Vec<AttrFairness>,
}

impl FairnessReport {
    pub fn attribute(&self, name: &str) -> Option<&AttrFairness> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

fn grouping_for(values: &[f64], kind: AttrKind) -> Option<Grouping> {
    match kind {
        AttrKind::Discrete { .. } => Some(Grouping::Discrete),
        AttrKind::Continuous => QuantileGrid::from_sample(values).ok().map(Grouping::Continuous),
    }
}

/// Utility and every applicable fairness metric for `scores`.
///
/// For classification the threshold is chosen on these scores unless
/// `threshold` is given; SP/EO then compare rates of `I(score > tau)`. For
/// regression they compare mean scores.
pub fn fairness_report(
    scores: &[f64],
    attrs: &[SensitiveAttr],
    y: &[f64],
    outcome: OutcomeKind,
    threshold: Option<f64>,
) -> Result<FairnessReport> {
    let (utility, tau, response) = match outcome {
        OutcomeKind::Binary => {
            let tau = threshold.or_else(|| choose_threshold(scores, y).ok());
            let utility = auc(scores, y).ok().map(Utility::Auc);
            let response = tau.map(|t| binarize(scores, t));
            (utility, tau, response)
        }
        OutcomeKind::Continuous => (Some(Utility::Mae(mae(scores, y)?)), None, Some(scores.to_vec())),
    };
    let y_grouping = match outcome {
        OutcomeKind::Binary => Some(Grouping::Discrete),
        OutcomeKind::Continuous => QuantileGrid::from_sample(y).ok().map(Grouping::Continuous),
    };

    let mut attributes = Vec::with_capacity(attrs.len());
    for attr in attrs {
        let a = &attr.codes;
        let a_grouping = grouping_for(a, attr.kind);
        let groups = match &a_grouping {
            Some(g) => g.masks(a).len(),
            None => 0,
        };
        let binary_a = matches!(attr.kind, AttrKind::Discrete { levels } if levels <= 2);
        let ks_gsp_v = a_grouping.as_ref().and_then(|g| ks_gsp(scores, a, g).ok());
        let ks_geo_v = match (&a_grouping, &y_grouping) {
            (Some(ga), Some(gy)) => ks_geo(scores, a, ga, y, gy).ok(),
            _ => None,
        };
        let (sp, eo) = match (&response, &a_grouping, &y_grouping) {
            (Some(r), Some(Grouping::Discrete), _) if binary_a => {
                let eo = match outcome {
                    OutcomeKind::Binary => eo_discrete(r, a, y).ok(),
                    OutcomeKind::Continuous => None,
                };
                (sp_discrete(r, a).ok(), eo)
            }
            (Some(r), Some(Grouping::Continuous(grid)), Some(gy)) => {
                (sp_continuous(r, a, grid).ok(), eo_continuous(r, a, grid, y, gy).ok())
            }
            _ => (None, None),
        };
        attributes.push(AttrFairness { name: attr.name.clone(), groups, sp, ks_gsp: ks_gsp_v, eo, ks_geo: ks_geo_v });
    }
    Ok(FairnessReport { utility, threshold: tau, attributes })
}
