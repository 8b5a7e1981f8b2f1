//! Distributional checks on the resampled attribute rows.

use fairpen::data::*;
use fairpen::nn::Matrix;
use fairpen::rng::{stream, Stream};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const LEVELS: usize = 4;

fn skewed_dataset() -> TabularDataset {
    // level k appears 10 * (k + 1) times
    let codes: Vec<f64> = (0..LEVELS).flat_map(|k| std::iter::repeat_n(k as f64, 10 * (k + 1))).collect();
    let n = codes.len();
    TabularDataset::from_arrays(
        Matrix::zeros(n, 1),
        vec![SensitiveColumn { name: "a".into(), kind: AttrKind::Discrete { levels: LEVELS }, values: codes }],
        vec![0.0; n],
        OutcomeKind::Binary,
    )
    .unwrap()
}

fn level_of(row: &[f64]) -> usize {
    row.iter().position(|&v| v == 1.0).unwrap()
}

fn expected(d: &TabularDataset) -> Vec<f64> {
    let mut p = vec![0.0; LEVELS];
    for r in 0..d.n() {
        p[level_of(d.a().row(r))] += 1.0 / d.n() as f64;
    }
    p
}

fn chi_square_p(counts: &[f64], probs: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    let stat: f64 = counts.iter().zip(probs).map(|(c, p)| (c - total * p).powi(2) / (total * p)).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

fn a_prime_p_value(sampler: SamplerKind, n_b: usize, seed: u64) -> f64 {
    let d = skewed_dataset();
    let mut batch_rng = stream(seed, Stream::Batching);
    let mut sampler_rng = stream(seed, Stream::Sampler);
    let mut counts = vec![0.0; LEVELS];
    for _ in 0..100_000 / n_b {
        let b = minibatch_construct(&d, n_b, sampler, &mut batch_rng, &mut sampler_rng).unwrap();
        for r in 0..b.len() {
            counts[level_of(b.a_prime.row(r))] += 1.0;
        }
    }
    chi_square_p(&counts, &expected(&d))
}

#[test]
fn within_batch_a_prime_follows_the_marginal() {
    assert!(a_prime_p_value(SamplerKind::WithinBatch, 10, 3) > 0.01);
}

#[test]
fn disjoint_a_prime_follows_the_marginal() {
    assert!(a_prime_p_value(SamplerKind::Disjoint, 10, 4) > 0.01);
}

#[test]
fn marginal_draws_stay_within_binomial_bounds() {
    let d = skewed_dataset();
    let m = marginal_of_a(&d);
    let draws = 100_000;
    let rows = m.draw_rows(draws, &mut stream(11, Stream::Sampler));
    let mut counts = vec![0.0; LEVELS];
    for r in 0..draws {
        counts[level_of(rows.row(r))] += 1.0;
    }
    for (c, p) in counts.iter().zip(expected(&d)) {
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((c - mean).abs() < 3.0 * sd, "count {c} vs {mean} +- {sd}");
    }
    assert!(chi_square_p(&counts, &expected(&d)) > 0.01);
}

#[test]
fn a_prime_is_decoupled_from_the_paired_row() {
    // an independent draw matches its row at the marginal collision rate
    let d = skewed_dataset();
    let p = expected(&d);
    let collide: f64 = p.iter().map(|q| q * q).sum();
    let mut batch_rng = stream(5, Stream::Batching);
    let mut sampler_rng = stream(5, Stream::Sampler);
    let (mut same, mut total) = (0.0, 0.0);
    for _ in 0..5_000 {
        let b = minibatch_construct(&d, 20, SamplerKind::Disjoint, &mut batch_rng, &mut sampler_rng).unwrap();
        for r in 0..b.len() {
            same += f64::from(u8::from(b.a.row(r) == b.a_prime.row(r)));
            total += 1.0;
        }
    }
    let rate = same / total;
    assert!((rate - collide).abs() < 0.02, "collision rate {rate} vs {collide}");
}
