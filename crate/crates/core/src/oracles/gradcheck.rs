//! Central finite-difference checks of the analytic gradients.

use std::cell::RefCell;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{AttrKind, OutcomeKind, SensitiveColumn, TabularDataset};
use crate::nn::{bce_loss, mae_loss, Activation, LayerSpec, LossEval, Matrix, Mlp, Mode};
use crate::penalties::{
    empirical_pmf_ratio, geo_penalty, gsp_penalty, BetaPoint, BetaSource, GeoDiscriminator, GspDiscriminator,
    PenaltyEval,
};

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// `|a - b| / (|a| + |b|)` in the Euclidean norm, with the denominator
/// floored at 1e-6 so that an exactly-zero gradient is compared against
/// round-off in absolute terms.
pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / (na + nb).max(1e-6)
}

/// Result of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub label: String,
    /// Relative error of the parameter gradient.
    pub param_error: f64,
    /// Relative error of the gradient with respect to the network input or
    /// the scores.
    pub input_error: f64,
}

impl GradCheck {
    pub fn worst(&self) -> f64 {
        self.param_error.max(self.input_error)
    }
}

/// Which building blocks the random configurations exercised.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Coverage {
    pub dense: bool,
    pub batch_norm: bool,
    pub relu: bool,
    pub sigmoid: bool,
    pub identity: bool,
    pub bce: bool,
    pub mae: bool,
}

impl Coverage {
    pub fn complete(&self) -> bool {
        self.dense && self.batch_norm && self.relu && self.sigmoid && self.identity && self.bce && self.mae
    }
}

// Moves parameters off their initial values; zero biases put ReLU inputs on the kink.
fn jitter(net: &mut Mlp, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p = net.params();
    p.iter_mut().for_each(|v| *v += rng.gen_range(-0.3..0.3));
    net.set_params(&p).expect("same length");
    p
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect()).expect("sized")
}

fn random_specs(rng: &mut ChaCha8Rng, bce_head: bool, cov: &mut Coverage) -> Vec<LayerSpec> {
    let mut specs = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        specs.push(LayerSpec::Dense(rng.gen_range(2..=6)));
        cov.dense = true;
        if rng.gen_bool(0.5) {
            specs.push(LayerSpec::BatchNorm);
            cov.batch_norm = true;
        }
        let act = [Activation::Relu, Activation::Sigmoid, Activation::Identity][rng.gen_range(0..3)];
        match act {
            Activation::Relu => cov.relu = true,
            Activation::Sigmoid => cov.sigmoid = true,
            Activation::Identity => cov.identity = true,
        }
        specs.push(LayerSpec::Activation(act));
    }
    specs.push(LayerSpec::Dense(1));
    specs.push(LayerSpec::Activation(if bce_head { Activation::Sigmoid } else { Activation::Identity }));
    specs
}

fn loss(net: &mut Mlp, x: &Matrix, y: &[f64], bce: bool) -> LossEval {
    let out = net.forward(x, Mode::Train).expect("valid shapes").into_vec();
    if bce {
        bce_loss(&out, y).expect("valid shapes")
    } else {
        mae_loss(&out, y).expect("valid shapes")
    }
}

fn central<F: FnMut(&[f64]) -> f64>(base: &[f64], mut f: F) -> Vec<f64> {
    let mut out = vec![0.0; base.len()];
    let mut p = base.to_vec();
    for k in 0..base.len() {
        p[k] = base[k] + FD_STEP;
        let fp = f(&p);
        p[k] = base[k] - FD_STEP;
        let fm = f(&p);
        p[k] = base[k];
        out[k] = (fp - fm) / (2.0 * FD_STEP);
    }
    out
}

/// Random networks of dense, batch-norm and activation layers under a BCE
/// head (even configurations) or an MAE head (odd ones).
pub fn network_gradient_checks(configs: u64, seed: u64) -> (Vec<GradCheck>, Coverage) {
    let mut cov = Coverage::default();
    let mut out = Vec::new();
    for config in 0..configs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(config));
        let bce = config % 2 == 0;
        if bce {
            cov.bce = true;
        } else {
            cov.mae = true;
        }
        let specs = random_specs(&mut rng, bce, &mut cov);
        let input = rng.gen_range(1..=5);
        let rows = rng.gen_range(3..=8);
        let mut net = Mlp::new(input, &specs, &mut rng).expect("valid specs");
        let base = jitter(&mut net, &mut rng);
        let x = random_matrix(&mut rng, rows, input);
        let y: Vec<f64> =
            (0..rows).map(|_| if bce { f64::from(rng.gen_range(0u8..2)) } else { rng.gen_range(-1.0..1.0) }).collect();

        net.zero_grad();
        let l = loss(&mut net, &x, &y, bce);
        let dx = net.backward(&Matrix::column(l.grad)).expect("primed");
        let analytic = net.grads();
        let numeric = central(&base, |p| {
            net.set_params(p).expect("same length");
            loss(&mut net, &x, &y, bce).value
        });
        net.set_params(&base).expect("same length");
        let numeric_x = central(x.as_slice(), |v| {
            let xm = Matrix::from_vec(rows, input, v.to_vec()).expect("sized");
            loss(&mut net, &xm, &y, bce).value
        });
        out.push(GradCheck {
            label: format!("network {config} {specs:?}"),
            param_error: rel_error(&analytic, &numeric),
            input_error: rel_error(dx.as_slice(), &numeric_x),
        });
    }
    (out, cov)
}

fn binary_column(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| f64::from(rng.gen_range(0u8..2))).collect()
}

fn check_penalty(
    label: String,
    mut eval: impl FnMut(&[f64]) -> (PenaltyEval, Vec<f64>),
    set: impl Fn(&[f64]),
    base: Vec<f64>,
    s: Vec<f64>,
) -> GradCheck {
    let (pen, analytic) = eval(&s);
    let numeric = central(&base, |p| {
        set(p);
        eval(&s).0.value
    });
    set(&base);
    let numeric_s = central(&s, |sv| eval(sv).0.value);
    GradCheck { label, param_error: rel_error(&analytic, &numeric), input_error: rel_error(&pen.grad_s, &numeric_s) }
}

/// The GSP penalty and both placements of the GEO weights, differentiated
/// with respect to the discriminator parameters and the scores.
pub fn penalty_gradient_checks(configs: u64, seed: u64) -> Vec<GradCheck> {
    let mut out = Vec::new();
    for config in 0..configs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(config));
        let n = rng.gen_range(3..=8);
        let bn = config % 2 == 0;
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let a = Matrix::column(binary_column(&mut rng, n));
        let a_prime = Matrix::column(binary_column(&mut rng, n));
        let y = binary_column(&mut rng, n);

        let d = RefCell::new(GspDiscriminator::new(1, &[5, 4], bn, &mut rng).expect("valid shape"));
        let base = jitter(&mut d.borrow_mut().net, &mut rng);
        out.push(check_penalty(
            format!("gsp {config}"),
            |s| {
                let mut d = d.borrow_mut();
                d.net.zero_grad();
                let pen = gsp_penalty(&mut d, s, &a, &a_prime, Mode::Train).expect("valid shapes");
                (pen, d.net.grads())
            },
            |p| d.borrow_mut().net.set_params(p).expect("same length"),
            base,
            s.clone(),
        ));

        let ds = TabularDataset::from_arrays(
            Matrix::zeros(40, 1),
            vec![SensitiveColumn {
                name: "a".into(),
                kind: AttrKind::Discrete { levels: 2 },
                values: binary_column(&mut rng, 40),
            }],
            binary_column(&mut rng, 40),
            OutcomeKind::Binary,
        )
        .expect("valid toy");
        let beta = BetaSource::Table(empirical_pmf_ratio(&ds).expect("discrete toy"));
        for point in [BetaPoint::Paired, BetaPoint::Resampled] {
            let g = RefCell::new(GeoDiscriminator::new(1, &[4, 3], bn, &mut rng).expect("valid shape"));
            let base = jitter(&mut g.borrow_mut().net, &mut rng);
            out.push(check_penalty(
                format!("geo {point:?} {config}"),
                |s| {
                    let mut g = g.borrow_mut();
                    g.net.zero_grad();
                    let pen =
                        geo_penalty(&mut g, &beta, point, s, &a, &y, &a_prime, Mode::Train).expect("valid shapes");
                    (pen, g.net.grads())
                },
                |p| g.borrow_mut().net.set_params(p).expect("same length"),
                base,
                s.clone(),
            ));
        }
    }
    out
}
