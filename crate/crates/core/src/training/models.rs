//! Default network shapes.

use rand::Rng;

use super::config::Task;
use crate::nn::{Activation, Mlp};
use crate::penalties::{GeoDiscriminator, GspDiscriminator};
use crate::rng::{stream, Stream};
use crate::Result;

fn width(task: Task) -> usize {
    match task {
        Task::BinaryClassification => 64,
        Task::Regression => 16,
    }
}

/// `[Dense - BN - ReLU] * 3 - Dense(1)` with a sigmoid head for classification
/// and an identity head for regression.
pub fn default_model<R: Rng + ?Sized>(p: usize, task: Task, rng: &mut R) -> Result<Mlp> {
    let head = match task {
        Task::BinaryClassification => Activation::Sigmoid,
        Task::Regression => Activation::Identity,
    };
    let w = width(task);
    Mlp::feed_forward(p, &[w, w, w], true, head, rng)
}

/// `[Dense - BN - ReLU] * 2 - Dense(1) - Sigmoid`.
pub fn default_gsp_discriminator<R: Rng + ?Sized>(l: usize, task: Task, rng: &mut R) -> Result<GspDiscriminator> {
    let w = width(task);
    GspDiscriminator::new(l, &[w, w], true, rng)
}

pub fn default_geo_discriminator<R: Rng + ?Sized>(l: usize, task: Task, rng: &mut R) -> Result<GeoDiscriminator> {
    let w = width(task);
    GeoDiscriminator::new(l, &[w, w], true, rng)
}

/// Hidden widths of the density-ratio network (no batch normalization).
pub fn default_ratio_hidden(task: Task) -> Vec<usize> {
    vec![width(task); 2]
}

/// `h` and `D` initialized from the seed's model and discriminator streams.
pub fn default_gsp_pair(p: usize, l: usize, task: Task, seed: u64) -> Result<(Mlp, GspDiscriminator)> {
    Ok((
        default_model(p, task, &mut stream(seed, Stream::ModelInit))?,
        default_gsp_discriminator(l, task, &mut stream(seed, Stream::DiscriminatorInit))?,
    ))
}

pub fn default_geo_pair(p: usize, l: usize, task: Task, seed: u64) -> Result<(Mlp, GeoDiscriminator)> {
    Ok((
        default_model(p, task, &mut stream(seed, Stream::ModelInit))?,
        default_geo_discriminator(l, task, &mut stream(seed, Stream::DiscriminatorInit))?,
    ))
}
