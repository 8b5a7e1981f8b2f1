//! Metric implementations against independent brute-force references.

use fairpen::metrics::*;
use fairpen::oracles::*;
use proptest::collection::vec;
use proptest::prelude::*;

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-12,
        (None, None) => true,
        _ => false,
    }
}

/// Scores mixing a coarse lattice (ties) with continuous values.
fn score() -> impl Strategy<Value = f64> {
    prop_oneof![(0u8..8).prop_map(|k| f64::from(k) / 8.0), 0.0..1.0f64]
}

#[derive(Debug, Clone)]
struct Instance {
    scores: Vec<f64>,
    a_bin: Vec<f64>,
    y_bin: Vec<f64>,
    a_cont: Vec<f64>,
    y_cont: Vec<f64>,
    tau: f64,
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=50).prop_flat_map(|n| {
        (vec(score(), n), vec(0u8..2, n), vec(0u8..2, n), vec(score(), n), vec(score(), n), 0.0..1.0f64).prop_map(
            |(scores, a, y, a_cont, y_cont, tau)| Instance {
                scores,
                a_bin: a.into_iter().map(f64::from).collect(),
                y_bin: y.into_iter().map(f64::from).collect(),
                a_cont,
                y_cont,
                tau,
            },
        )
    })
}

fn grid(v: &[f64]) -> QuantileGrid {
    QuantileGrid::from_sample(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn deciles_match(v in vec(score(), 1..=50)) {
        prop_assert_eq!(grid(&v).values().to_vec(), brute_force_deciles(&v));
    }

    #[test]
    fn ks_matches_brute_force(i in instance()) {
        let s = &i.scores;
        prop_assert!(close(ks_gsp(s, &i.a_bin, &Grouping::Discrete).ok(), brute_force_ks_gsp(s, &i.a_bin, false)));
        prop_assert!(close(
            ks_gsp(s, &i.a_cont, &Grouping::Continuous(grid(&i.a_cont))).ok(),
            brute_force_ks_gsp(s, &i.a_cont, true)
        ));
        prop_assert!(close(
            ks_geo(s, &i.a_bin, &Grouping::Discrete, &i.y_bin, &Grouping::Discrete).ok(),
            brute_force_ks_geo(s, &i.a_bin, false, &i.y_bin, false)
        ));
        prop_assert!(close(
            ks_geo(s, &i.a_cont, &Grouping::Continuous(grid(&i.a_cont)), &i.y_bin, &Grouping::Discrete).ok(),
            brute_force_ks_geo(s, &i.a_cont, true, &i.y_bin, false)
        ));
        prop_assert!(close(
            ks_geo(s, &i.a_cont, &Grouping::Continuous(grid(&i.a_cont)), &i.y_cont, &Grouping::Continuous(grid(&i.y_cont))).ok(),
            brute_force_ks_geo(s, &i.a_cont, true, &i.y_cont, true)
        ));
    }

    #[test]
    fn auc_matches_pairwise_count(i in instance()) {
        prop_assert!(close(auc(&i.scores, &i.y_bin).ok(), brute_force_auc(&i.scores, &i.y_bin)));
    }

    #[test]
    fn parity_matches_brute_force(i in instance()) {
        let yhat = binarize(&i.scores, i.tau);
        for resp in [&yhat, &i.scores] {
            prop_assert!(close(sp_discrete(resp, &i.a_bin).ok(), brute_force_sp(resp, &i.a_bin, false)));
            prop_assert!(close(sp_continuous(resp, &i.a_cont, &grid(&i.a_cont)).ok(), brute_force_sp(resp, &i.a_cont, true)));
            prop_assert!(close(eo_discrete(resp, &i.a_bin, &i.y_bin).ok(), brute_force_eo(resp, &i.a_bin, false, &i.y_bin, false)));
            prop_assert!(close(
                eo_continuous(resp, &i.a_cont, &grid(&i.a_cont), &i.y_bin, &Grouping::Discrete).ok(),
                brute_force_eo(resp, &i.a_cont, true, &i.y_bin, false)
            ));
            prop_assert!(close(
                eo_continuous(resp, &i.a_cont, &grid(&i.a_cont), &i.y_cont, &Grouping::Continuous(grid(&i.y_cont))).ok(),
                brute_force_eo(resp, &i.a_cont, true, &i.y_cont, true)
            ));
        }
    }

    #[test]
    fn ks_and_auc_ignore_monotone_transforms(i in instance()) {
        let t: Vec<f64> = i.scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
        let g = Grouping::Continuous(grid(&i.a_cont));
        prop_assert_eq!(ks_gsp(&i.scores, &i.a_bin, &Grouping::Discrete).ok(), ks_gsp(&t, &i.a_bin, &Grouping::Discrete).ok());
        prop_assert_eq!(ks_gsp(&i.scores, &i.a_cont, &g).ok(), ks_gsp(&t, &i.a_cont, &g).ok());
        prop_assert_eq!(
            ks_geo(&i.scores, &i.a_bin, &Grouping::Discrete, &i.y_bin, &Grouping::Discrete).ok(),
            ks_geo(&t, &i.a_bin, &Grouping::Discrete, &i.y_bin, &Grouping::Discrete).ok()
        );
        prop_assert_eq!(auc(&i.scores, &i.y_bin).ok(), auc(&t, &i.y_bin).ok());
        let tau_t = (3.0 * i.tau).exp() - 7.0;
        prop_assert_eq!(sp_discrete(&binarize(&i.scores, i.tau), &i.a_bin).ok(), sp_discrete(&binarize(&t, tau_t), &i.a_bin).ok());
    }

    #[test]
    fn metrics_are_nonnegative_and_permutation_invariant(i in instance(), rot in 0usize..50) {
        let n = i.scores.len();
        let perm: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
        let p = |v: &[f64]| perm.iter().map(|&k| v[k]).collect::<Vec<f64>>();
        let g = grid(&i.a_cont);
        let gp = grid(&p(&i.a_cont));
        let a = sp_continuous(&i.scores, &i.a_cont, &g).ok();
        let b = sp_continuous(&p(&i.scores), &p(&i.a_cont), &gp).ok();
        prop_assert!(close(a, b));
        prop_assert!(a.is_none_or(|v| v >= 0.0));
        let a = ks_gsp(&i.scores, &i.a_bin, &Grouping::Discrete).unwrap();
        let b = ks_gsp(&p(&i.scores), &p(&i.a_bin), &Grouping::Discrete).unwrap();
        prop_assert!((a - b).abs() <= 1e-15 && a >= 0.0);
    }

    #[test]
    fn pareto_matches_brute_force(pts in vec((score(), score()), 1..=100)) {
        let points: Vec<ParetoPoint> = pts.iter().map(|&(u, f)| ParetoPoint::new(u, f)).collect();
        prop_assert_eq!(pareto_mask(&points), brute_force_pareto(&pts));
        let mut expect: Vec<(f64, f64)> = pts.iter().zip(brute_force_pareto(&pts)).filter(|(_, k)| *k).map(|(p, _)| *p).collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        expect.dedup();
        let front = pareto_frontier(&points);
        prop_assert_eq!(front.iter().map(|p| (p.utility, p.fairness)).collect::<Vec<_>>(), expect);
        prop_assert_eq!(pareto_frontier(&front), front);
    }
}

#[test]
fn fairness_is_zero_on_independent_constructions() {
    // every (a, y) cell holds the same score multiset
    let base = [0.1, 0.4, 0.4, 0.9];
    let mut s = Vec::new();
    let mut a = Vec::new();
    let mut y = Vec::new();
    for av in [0.0, 1.0] {
        for yv in [0.0, 1.0] {
            for &b in &base {
                s.push(b);
                a.push(av);
                y.push(yv);
            }
        }
    }
    assert_eq!(ks_gsp(&s, &a, &Grouping::Discrete).unwrap(), 0.0);
    assert_eq!(ks_geo(&s, &a, &Grouping::Discrete, &y, &Grouping::Discrete).unwrap(), 0.0);
    let yhat = binarize(&s, 0.3);
    assert_eq!(sp_discrete(&yhat, &a).unwrap(), 0.0);
    assert_eq!(eo_discrete(&yhat, &a, &y).unwrap(), 0.0);
}

#[test]
fn sp_continuous_ten_point_example() {
    let a: Vec<f64> = (1..=10).map(f64::from).collect();
    let yhat: Vec<f64> = a.iter().map(|&v| if v > 5.0 { 1.0 } else { 0.0 }).collect();
    let got = sp_continuous(&yhat, &a, &grid(&a)).unwrap();
    // A <= q for q = 1..9: rate max(0, q-5)/q against 0.5
    let expect = (1..=9)
        .map(|q| {
            let rate = (q as f64 - 5.0).max(0.0) / q as f64;
            (rate / 0.5 - 1.0).abs()
        })
        .sum::<f64>()
        / 9.0;
    assert!((got - expect).abs() < 1e-12);
    assert!(close(Some(got), brute_force_sp(&yhat, &a, true)));
}

#[test]
fn ks_random_twenty_point_instance() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let s: Vec<f64> = (0..20).map(|_| rng.gen()).collect();
    let mask: Vec<bool> = (0..20).map(|_| rng.gen_bool(0.4)).collect();
    let group: Vec<f64> = s.iter().zip(&mask).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
    assert!((ks_distance(&group, &s) - brute_force_ks(&s, &mask).unwrap()).abs() < 1e-12);
    assert_eq!(brute_force_ks(&[0.1, 0.2, 0.8, 0.9], &[true, true, false, false]).unwrap(), 0.5);
}
