//! Utility and fairness measurement.

mod auc;
mod groups;
mod ks;
mod pareto;
mod parity;
mod quantile;
mod report;

pub use auc::{auc, binarize, choose_threshold, mae};
pub use groups::Grouping;
pub use ks::{ks_distance, ks_geo, ks_gsp};
pub use pareto::{pareto_frontier, pareto_mask, topk_fair_summary, ParetoPoint, TopkSummary};
pub use parity::{eo_continuous, eo_discrete, sp_continuous, sp_discrete};
pub use quantile::{nearest_rank, QuantileGrid};
pub use report::{fairness_report, AttrFairness, FairnessReport, Utility};
