//! Discriminator-only training against fixed scores.

use crate::data::{minibatch_construct, SamplerKind, TabularDataset};
use crate::nn::{Direction, Mode, Sgd};
use crate::penalties::{geo_penalty, gsp_penalty, BetaPoint, BetaSource, GeoDiscriminator, GspDiscriminator};
use crate::rng::{stream, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorFit {
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub sampler: SamplerKind,
    pub seed: u64,
}

impl Default for DiscriminatorFit {
    fn default() -> Self {
        Self { iterations: 10_000, batch_size: 100, learning_rate: 0.005, sampler: SamplerKind::WithinBatch, seed: 0 }
    }
}

fn check(scores: &[f64], data: &TabularDataset) -> Result<()> {
    if scores.len() != data.n() {
        return Err(Error::dim("frozen scores", data.n(), scores.len()));
    }
    Ok(())
}

/// Ascends the GSP penalty in `d` with `scores[i]` standing in for `h(x_i)`.
pub fn fit_gsp_discriminator(
    d: &mut GspDiscriminator,
    scores: &[f64],
    data: &TabularDataset,
    fit: &DiscriminatorFit,
) -> Result<()> {
    check(scores, data)?;
    let opt = Sgd::new(fit.learning_rate)?;
    let mut batch_rng = stream(fit.seed, Stream::Batching);
    let mut sampler_rng = stream(fit.seed, Stream::Sampler);
    for _ in 0..fit.iterations {
        let b = minibatch_construct(data, fit.batch_size, fit.sampler, &mut batch_rng, &mut sampler_rng)?;
        let s: Vec<f64> = b.indices.iter().map(|&i| scores[i]).collect();
        gsp_penalty(d, &s, &b.a, &b.a_prime, Mode::Train)?;
        d.net.sgd_step(&opt, Direction::Maximize);
    }
    d.net.clear_caches();
    Ok(())
}

/// Ascends the GEO penalty in `d` with fixed scores and weights.
pub fn fit_geo_discriminator(
    d: &mut GeoDiscriminator,
    beta: &BetaSource,
    point: BetaPoint,
    scores: &[f64],
    data: &TabularDataset,
    fit: &DiscriminatorFit,
) -> Result<()> {
    check(scores, data)?;
    let opt = Sgd::new(fit.learning_rate)?;
    let mut batch_rng = stream(fit.seed, Stream::Batching);
    let mut sampler_rng = stream(fit.seed, Stream::Sampler);
    for _ in 0..fit.iterations {
        let b = minibatch_construct(data, fit.batch_size, fit.sampler, &mut batch_rng, &mut sampler_rng)?;
        let s: Vec<f64> = b.indices.iter().map(|&i| scores[i]).collect();
        geo_penalty(d, beta, point, &s, &b.a, &b.y, &b.a_prime, Mode::Train)?;
        d.net.sgd_step(&opt, Direction::Maximize);
    }
    d.net.clear_caches();
    Ok(())
}
