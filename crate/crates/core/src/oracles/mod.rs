//! Closed-form references, synthetic distributions and brute-force checkers.

mod brute;
mod discriminator;
mod gradcheck;
mod joint;
mod toys;

pub use brute::{
    brute_force_auc, brute_force_deciles, brute_force_eo, brute_force_ks, brute_force_ks_geo, brute_force_ks_gsp,
    brute_force_pareto, brute_force_sp,
};
pub use discriminator::{exact_geo_discriminator_oracle, paired_geo_discriminator_oracle};
pub use gradcheck::{network_gradient_checks, penalty_gradient_checks, rel_error, Coverage, GradCheck, FD_STEP};
pub use joint::DiscreteJoint;
pub use toys::{
    geo_toy, joint_dataset, ratio_toy_dataset, ratio_toy_truth, synth_bias, SyntheticBiasSpec, RATIO_TOY_CELLS,
};
