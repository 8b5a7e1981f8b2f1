//! Fairness-aware supervised learning with simple-random-sampling penalties.
//!
//! A scoring network `h` is trained against a discriminator `D` that tries to
//! tell real `(h(x), a)` pairs from pairs whose sensitive attribute was
//! resampled from its marginal. At the discriminator's optimum the penalty is a
//! Jensen-Shannon style divergence between the joint and the product of
//! marginals, so pushing it down drives `h(X)` towards independence from `A`
//! (generalized statistical parity) or, with density-ratio weights, towards
//! conditional independence given `Y` (generalized equalized odds).
//!
//! Modules:
//! - [`nn`]: a small dense/batch-norm network engine with manual backprop.
//! - [`data`]: CSV ingestion, splitting and minibatch construction.
//! - [`penalties`]: the GSP/GEO penalties and the density-ratio estimator.
//! - [`training`]: alternating min-max trainers and snapshot evaluation.
//! - [`metrics`]: AUC, SP/EO, KS statistics and Pareto frontiers.
//! - [`oracles`]: closed-form references and synthetic distributions.

pub mod data;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod oracles;
pub mod penalties;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
