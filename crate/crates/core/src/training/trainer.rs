//! Alternating min-max training of `h` against a discriminator.

use super::config::{BetaKind, Task, TrainConfig};
use super::models::default_ratio_hidden;
use super::snapshot::{checkpoint_id, evaluate_snapshot, Snapshot, Split};
use crate::data::{minibatch_construct, Minibatch, OutcomeKind, TabularDataset};
use crate::nn::{bce_loss, mae_loss, Direction, LossEval, Matrix, Mlp, Mode, Sgd};
use crate::penalties::{
    empirical_pmf_ratio, geo_penalty, gsp_penalty, pretrain_density_ratio, BetaPoint, BetaSource, GeoDiscriminator,
    GspDiscriminator, PenaltyEval, RatioConfig,
};
use crate::rng::{stream, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Discriminator,
    Model,
}

/// Hooks into a training run.
pub trait Observer {
    /// Called after every parameter update.
    fn on_update(&mut self, _iteration: usize, _player: Player) {}

    /// Called for every snapshot as it is recorded, with `h` at that point.
    fn on_snapshot(&mut self, _snapshot: &Snapshot, _h: &Mlp) -> Result<()> {
        Ok(())
    }
}

/// An observer that does nothing.
pub struct NoObserver;

impl Observer for NoObserver {}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Ordered by iteration, train before validation within an iteration.
    pub snapshots: Vec<Snapshot>,
    pub h: Mlp,
    pub discriminator: Mlp,
    /// The frozen weights used by a GEO run.
    pub beta: Option<BetaSource>,
}

trait Adversary {
    fn net(&mut self) -> &mut Mlp;
    fn penalty(&mut self, s: &[f64], batch: &Minibatch) -> Result<PenaltyEval>;
}

struct Gsp<'a>(&'a mut GspDiscriminator);

impl Adversary for Gsp<'_> {
    fn net(&mut self) -> &mut Mlp {
        &mut self.0.net
    }

    fn penalty(&mut self, s: &[f64], b: &Minibatch) -> Result<PenaltyEval> {
        gsp_penalty(self.0, s, &b.a, &b.a_prime, Mode::Train)
    }
}

struct Geo<'a> {
    d: &'a mut GeoDiscriminator,
    beta: &'a BetaSource,
    point: BetaPoint,
}

impl Adversary for Geo<'_> {
    fn net(&mut self) -> &mut Mlp {
        &mut self.d.net
    }

    fn penalty(&mut self, s: &[f64], b: &Minibatch) -> Result<PenaltyEval> {
        geo_penalty(self.d, self.beta, self.point, s, &b.a, &b.y, &b.a_prime, Mode::Train)
    }
}

fn check_inputs(train: &TabularDataset, val: &TabularDataset, h: &Mlp, l: usize, config: &TrainConfig) -> Result<()> {
    config.validate()?;
    if h.input_width() != train.p() || val.p() != train.p() {
        return Err(Error::dim("h input width", train.p(), h.input_width()));
    }
    if h.output_width() != 1 {
        return Err(Error::dim("h output width", 1, h.output_width()));
    }
    if l != train.l() || val.l() != train.l() {
        return Err(Error::dim("discriminator attribute width", train.l(), l));
    }
    let expected = match config.task {
        Task::BinaryClassification => OutcomeKind::Binary,
        Task::Regression => OutcomeKind::Continuous,
    };
    if train.outcome() != expected || val.outcome() != expected {
        return Err(Error::Config(format!("task {:?} does not match the outcome column", config.task)));
    }
    Ok(())
}

pub(crate) fn utility_loss(task: Task, s: &[f64], y: &[f64]) -> Result<LossEval> {
    match task {
        Task::BinaryClassification => bce_loss(s, y),
        Task::Regression => mae_loss(s, y),
    }
}

fn record(
    iteration: usize,
    h: &Mlp,
    train: &TabularDataset,
    val: &TabularDataset,
    config: &TrainConfig,
    snapshots: &mut Vec<Snapshot>,
    observer: &mut dyn Observer,
) -> Result<()> {
    let mut splits = Vec::with_capacity(2);
    if config.eval_train {
        splits.push((Split::Train, train));
    }
    splits.push((Split::Validation, val));
    for (split, data) in splits {
        let snap =
            Snapshot { iteration, split, report: evaluate_snapshot(h, data)?, checkpoint_id: checkpoint_id(iteration) };
        observer.on_snapshot(&snap, h)?;
        snapshots.push(snap);
    }
    Ok(())
}

fn run(
    train: &TabularDataset,
    val: &TabularDataset,
    mut h: Mlp,
    adversary: &mut dyn Adversary,
    config: &TrainConfig,
    observer: &mut dyn Observer,
) -> Result<(Vec<Snapshot>, Mlp)> {
    let opt = Sgd::new(config.learning_rate)?;
    let (c_loss, c_pen) = config.coefficients();
    let mut batch_rng = stream(config.seed, Stream::Batching);
    let mut sampler_rng = stream(config.seed, Stream::Sampler);
    let mut snapshots = Vec::new();
    adversary.net().zero_grad();
    h.zero_grad();

    for t in 1..=config.iterations {
        let b = minibatch_construct(train, config.batch_size, config.sampler, &mut batch_rng, &mut sampler_rng)?;
        let s = h.forward(&b.x, Mode::Train)?.into_vec();

        for _ in 0..config.disc_steps {
            adversary.penalty(&s, &b)?;
            adversary.net().sgd_step(&opt, Direction::Maximize);
            observer.on_update(t, Player::Discriminator);
        }

        let loss = utility_loss(config.task, &s, &b.y)?;
        let mut upstream: Vec<f64> = loss.grad.iter().map(|g| c_loss * g).collect();
        if c_pen != 0.0 {
            let pen = adversary.penalty(&s, &b)?;
            adversary.net().zero_grad();
            for (u, g) in upstream.iter_mut().zip(&pen.grad_s) {
                *u += c_pen * g;
            }
        }
        h.backward(&Matrix::column(upstream))?;
        h.sgd_step(&opt, Direction::Minimize);
        observer.on_update(t, Player::Model);

        if t % config.eval_interval == 0 || t == config.iterations {
            record(t, &h, train, val, config, &mut snapshots, observer)?;
        }
    }
    h.clear_caches();
    adversary.net().clear_caches();
    Ok((snapshots, h))
}

/// Trains `h` for generalized statistical parity.
///
/// Each iteration draws one minibatch, takes `disc_steps` ascent steps of `d`
/// on the penalty, then one descent step of `h` on the combined objective.
pub fn train_gsp(
    train: &TabularDataset,
    val: &TabularDataset,
    h: Mlp,
    mut d: GspDiscriminator,
    config: &TrainConfig,
    observer: &mut dyn Observer,
) -> Result<TrainResult> {
    check_inputs(train, val, &h, d.attr_width(), config)?;
    let (snapshots, h) = run(train, val, h, &mut Gsp(&mut d), config, observer)?;
    Ok(TrainResult { snapshots, h, discriminator: d.net, beta: None })
}

/// Builds the frozen GEO weights requested by `config` from `train`.
pub fn prepare_beta(train: &TabularDataset, config: &TrainConfig) -> Result<BetaSource> {
    Ok(match config.beta {
        BetaKind::Unit => BetaSource::Unit,
        BetaKind::Empirical => BetaSource::Table(empirical_pmf_ratio(train)?),
        BetaKind::Neural => BetaSource::Neural(pretrain_density_ratio(
            train,
            &RatioConfig {
                iterations: config.ratio_iterations,
                batch_size: config.batch_size,
                learning_rate: config.learning_rate,
                hidden: default_ratio_hidden(config.task),
                sampler: config.sampler,
                seed: config.seed,
            },
        )?),
    })
}

/// Trains `h` for generalized equalized odds: builds the density-ratio
/// weights first, then alternates as in [`train_gsp`] with the weighted
/// penalty.
pub fn train_geo(
    train: &TabularDataset,
    val: &TabularDataset,
    h: Mlp,
    d: GeoDiscriminator,
    config: &TrainConfig,
    observer: &mut dyn Observer,
) -> Result<TrainResult> {
    check_inputs(train, val, &h, d.attr_width(), config)?;
    let beta = prepare_beta(train, config)?;
    train_geo_with_beta(train, val, h, d, beta, config, observer)
}

/// [`train_geo`] with precomputed weights.
pub fn train_geo_with_beta(
    train: &TabularDataset,
    val: &TabularDataset,
    h: Mlp,
    mut d: GeoDiscriminator,
    beta: BetaSource,
    config: &TrainConfig,
    observer: &mut dyn Observer,
) -> Result<TrainResult> {
    check_inputs(train, val, &h, d.attr_width(), config)?;
    let mut adv = Geo { d: &mut d, beta: &beta, point: config.beta_point };
    let (snapshots, h) = run(train, val, h, &mut adv, config, observer)?;
    Ok(TrainResult { snapshots, h, discriminator: d.net, beta: Some(beta) })
}

/// Penalty-free training of `h` with the same batching streams, for
/// reference.
pub fn train_erm(train: &TabularDataset, mut h: Mlp, config: &TrainConfig) -> Result<Mlp> {
    config.validate()?;
    let opt = Sgd::new(config.learning_rate)?;
    let mut batch_rng = stream(config.seed, Stream::Batching);
    let mut sampler_rng = stream(config.seed, Stream::Sampler);
    for _ in 0..config.iterations {
        let b = minibatch_construct(train, config.batch_size, config.sampler, &mut batch_rng, &mut sampler_rng)?;
        let s = h.forward(&b.x, Mode::Train)?.into_vec();
        let loss = utility_loss(config.task, &s, &b.y)?;
        h.backward(&Matrix::column(loss.grad))?;
        h.sgd_step(&opt, Direction::Minimize);
    }
    h.clear_caches();
    Ok(h)
}
