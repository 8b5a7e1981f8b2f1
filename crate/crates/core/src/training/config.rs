use crate::data::SamplerKind;
use crate::penalties::BetaPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Task {
    #[default]
    BinaryClassification,
    Regression,
}

/// How the utility loss and the penalty are combined for `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    /// `(1 - lambda) * loss + lambda * penalty`.
    #[default]
    Convex,
    /// `loss + lambda * penalty`.
    Plain,
}

/// Where the GEO weights come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaKind {
    /// A density-ratio network pre-trained for `ratio_iterations` steps.
    #[default]
    Neural,
    /// Plug-in ratios from the empirical pmf (discrete data only).
    Empirical,
    /// All weights 1.
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    /// Outer iterations `T`.
    pub iterations: usize,
    /// Discriminator steps per outer iteration `T'`.
    pub disc_steps: usize,
    /// Density-ratio pre-training iterations `L` (GEO only).
    pub ratio_iterations: usize,
    pub batch_size: usize,
    pub eval_interval: usize,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub task: Task,
    pub scaling: Scaling,
    pub beta: BetaKind,
    pub beta_point: BetaPoint,
    /// Also evaluate on the training split at each snapshot.
    pub eval_train: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            learning_rate: 0.005,
            iterations: 1000,
            disc_steps: 1,
            ratio_iterations: 1000,
            batch_size: 100,
            eval_interval: 100,
            seed: 0,
            sampler: SamplerKind::WithinBatch,
            task: Task::BinaryClassification,
            scaling: Scaling::Convex,
            beta: BetaKind::Neural,
            beta_point: BetaPoint::Paired,
            eval_train: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda must be in [0, 1], got {}", self.lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        for (name, v) in [
            ("iterations", self.iterations),
            ("disc_steps", self.disc_steps),
            ("ratio_iterations", self.ratio_iterations),
            ("batch_size", self.batch_size),
            ("eval_interval", self.eval_interval),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Coefficients `(utility, penalty)` applied to the two gradients of `h`.
    pub fn coefficients(&self) -> (f64, f64) {
        match self.scaling {
            Scaling::Convex => (1.0 - self.lambda, self.lambda),
            Scaling::Plain => (1.0, self.lambda),
        }
    }
}
