//! The closed set of layers understood by [`Mlp`](super::Mlp).

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use super::matrix::{axpy, dot, Matrix};
use crate::{Error, Result};

/// Whether a forward pass may update batch statistics and cache inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Inference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Activation::Relu),
            "sigmoid" => Some(Activation::Sigmoid),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Fully connected layer `y = x W^T + b` with `W` stored as `out x in`.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub(crate) weights: Matrix,
    pub(crate) bias: Vec<f64>,
    pub(crate) grad_weights: Matrix,
    pub(crate) grad_bias: Vec<f64>,
    cached_input: Option<Matrix>,
}

impl DenseLayer {
    /// Glorot-uniform weights, zero bias.
    pub fn new<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        let values = (0..in_dim * out_dim).map(|_| dist.sample(rng)).collect();
        let weights = Matrix::from_vec(out_dim, in_dim, values).expect("sized above");
        Self::from_parameters(weights, vec![0.0; out_dim]).expect("sized above")
    }

    pub fn from_parameters(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::dim("DenseLayer bias", weights.rows(), bias.len()));
        }
        Ok(Self {
            grad_weights: Matrix::zeros(weights.rows(), weights.cols()),
            grad_bias: vec![0.0; bias.len()],
            weights,
            bias,
            cached_input: None,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn forward(&mut self, x: &Matrix, mode: Mode) -> Matrix {
        let mut y = Matrix::zeros(x.rows(), self.out_dim());
        for r in 0..x.rows() {
            let xr = x.row(r);
            let yr = y.row_mut(r);
            for (o, yo) in yr.iter_mut().enumerate() {
                *yo = dot(xr, self.weights.row(o)) + self.bias[o];
            }
        }
        self.cached_input = (mode == Mode::Train).then(|| x.clone());
        y
    }

    fn backward(&mut self, grad: &Matrix) -> Result<Matrix> {
        let x = self
            .cached_input
            .as_ref()
            .ok_or_else(|| Error::State("backward called without a train-mode forward".into()))?;
        let mut dx = Matrix::zeros(x.rows(), self.in_dim());
        for r in 0..x.rows() {
            let gr = grad.row(r);
            let xr = x.row(r);
            for (o, &g) in gr.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                self.grad_bias[o] += g;
                axpy(g, xr, self.grad_weights.row_mut(o));
                axpy(g, self.weights.row(o), dx.row_mut(r));
            }
        }
        Ok(dx)
    }

    fn clear_cache(&mut self) {
        self.cached_input = None;
    }
}

/// Batch normalization over the rows of a batch.
///
/// Train mode normalizes with the batch mean and (biased) variance and folds
/// them into exponential running averages; inference mode uses only the
/// running averages.
#[derive(Debug, Clone)]
pub struct BatchNormLayer {
    pub(crate) gamma: Vec<f64>,
    pub(crate) beta_shift: Vec<f64>,
    pub(crate) running_mean: Vec<f64>,
    pub(crate) running_var: Vec<f64>,
    pub(crate) momentum: f64,
    pub(crate) epsilon: f64,
    pub(crate) grad_gamma: Vec<f64>,
    pub(crate) grad_beta: Vec<f64>,
    cache: Option<BnCache>,
}

#[derive(Debug, Clone)]
struct BnCache {
    x_hat: Matrix,
    inv_std: Vec<f64>,
}

impl BatchNormLayer {
    pub const DEFAULT_MOMENTUM: f64 = 0.99;
    pub const DEFAULT_EPSILON: f64 = 1e-5;

    pub fn new(width: usize) -> Self {
        Self::with_hyperparameters(width, Self::DEFAULT_MOMENTUM, Self::DEFAULT_EPSILON)
    }

    pub fn with_hyperparameters(width: usize, momentum: f64, epsilon: f64) -> Self {
        Self {
            gamma: vec![1.0; width],
            beta_shift: vec![0.0; width],
            running_mean: vec![0.0; width],
            running_var: vec![1.0; width],
            momentum,
            epsilon,
            grad_gamma: vec![0.0; width],
            grad_beta: vec![0.0; width],
            cache: None,
        }
    }

    pub fn width(&self) -> usize {
        self.gamma.len()
    }

    pub fn running_mean(&self) -> &[f64] {
        &self.running_mean
    }

    pub fn running_var(&self) -> &[f64] {
        &self.running_var
    }

    fn forward(&mut self, x: &Matrix, mode: Mode) -> Result<Matrix> {
        let width = self.width();
        let n = x.rows();
        let mut y = Matrix::zeros(n, width);
        match mode {
            Mode::Inference => {
                let inv: Vec<f64> = self.running_var.iter().map(|v| 1.0 / (v + self.epsilon).sqrt()).collect();
                for r in 0..n {
                    let xr = x.row(r);
                    let yr = y.row_mut(r);
                    for c in 0..width {
                        yr[c] = self.gamma[c] * (xr[c] - self.running_mean[c]) * inv[c] + self.beta_shift[c];
                    }
                }
                self.cache = None;
            }
            Mode::Train => {
                if n == 0 {
                    return Err(Error::Size("batch normalization needs at least one row".into()));
                }
                let nf = n as f64;
                let mut mean = vec![0.0; width];
                for r in 0..n {
                    axpy(1.0, x.row(r), &mut mean);
                }
                mean.iter_mut().for_each(|m| *m /= nf);
                let mut var = vec![0.0; width];
                for r in 0..n {
                    for (c, v) in var.iter_mut().enumerate() {
                        let d = x.get(r, c) - mean[c];
                        *v += d * d;
                    }
                }
                var.iter_mut().for_each(|v| *v /= nf);
                let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + self.epsilon).sqrt()).collect();
                let mut x_hat = Matrix::zeros(n, width);
                for r in 0..n {
                    let xr = x.row(r);
                    let hr = x_hat.row_mut(r);
                    for c in 0..width {
                        hr[c] = (xr[c] - mean[c]) * inv_std[c];
                    }
                    let yr = y.row_mut(r);
                    for c in 0..width {
                        yr[c] = self.gamma[c] * x_hat.get(r, c) + self.beta_shift[c];
                    }
                }
                let m = self.momentum;
                for c in 0..width {
                    self.running_mean[c] = m * self.running_mean[c] + (1.0 - m) * mean[c];
                    self.running_var[c] = m * self.running_var[c] + (1.0 - m) * var[c];
                }
                self.cache = Some(BnCache { x_hat, inv_std });
            }
        }
        Ok(y)
    }

    fn backward(&mut self, grad: &Matrix) -> Result<Matrix> {
        let cache =
            self.cache.as_ref().ok_or_else(|| Error::State("backward called without a train-mode forward".into()))?;
        let width = self.width();
        let n = grad.rows();
        let nf = n as f64;
        // Per-column sums of g*gamma and g*gamma*x_hat.
        let mut sum_g = vec![0.0; width];
        let mut sum_gx = vec![0.0; width];
        for r in 0..n {
            let gr = grad.row(r);
            let hr = cache.x_hat.row(r);
            for c in 0..width {
                self.grad_gamma[c] += gr[c] * hr[c];
                self.grad_beta[c] += gr[c];
                sum_g[c] += gr[c] * self.gamma[c];
                sum_gx[c] += gr[c] * self.gamma[c] * hr[c];
            }
        }
        let mut dx = Matrix::zeros(n, width);
        for r in 0..n {
            let gr = grad.row(r);
            let hr = cache.x_hat.row(r);
            let dr = dx.row_mut(r);
            for c in 0..width {
                let gxh = gr[c] * self.gamma[c];
                dr[c] = cache.inv_std[c] / nf * (nf * gxh - sum_g[c] - hr[c] * sum_gx[c]);
            }
        }
        Ok(dx)
    }

    fn clear_cache(&mut self) {
        self.cache = None;
    }
}

#[derive(Debug, Clone)]
pub struct ActivationLayer {
    kind: Activation,
    /// Input for ReLU, output for sigmoid.
    cache: Option<Matrix>,
}

impl ActivationLayer {
    pub fn new(kind: Activation) -> Self {
        Self { kind, cache: None }
    }

    pub fn kind(&self) -> Activation {
        self.kind
    }

    fn forward(&mut self, x: &Matrix, mode: Mode) -> Matrix {
        let mut y = x.clone();
        match self.kind {
            Activation::Relu => y.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0)),
            Activation::Sigmoid => y.as_mut_slice().iter_mut().for_each(|v| *v = sigmoid(*v)),
            Activation::Identity => {}
        }
        self.cache = match (mode, self.kind) {
            (Mode::Inference, _) => None,
            (Mode::Train, Activation::Relu) => Some(x.clone()),
            (Mode::Train, Activation::Sigmoid) => Some(y.clone()),
            (Mode::Train, Activation::Identity) => Some(Matrix::zeros(0, 0)),
        };
        y
    }

    fn backward(&mut self, grad: &Matrix) -> Result<Matrix> {
        let cache =
            self.cache.as_ref().ok_or_else(|| Error::State("backward called without a train-mode forward".into()))?;
        let mut dx = grad.clone();
        match self.kind {
            Activation::Relu => {
                for (d, &x) in dx.as_mut_slice().iter_mut().zip(cache.as_slice()) {
                    if x <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            Activation::Sigmoid => {
                for (d, &y) in dx.as_mut_slice().iter_mut().zip(cache.as_slice()) {
                    *d *= y * (1.0 - y);
                }
            }
            Activation::Identity => {}
        }
        Ok(dx)
    }
}

#[derive(Debug, Clone)]
pub enum Layer {
    Dense(DenseLayer),
    BatchNorm(BatchNormLayer),
    Activation(ActivationLayer),
}

impl Layer {
    pub(crate) fn forward(&mut self, x: &Matrix, mode: Mode) -> Result<Matrix> {
        match self {
            Layer::Dense(l) => Ok(l.forward(x, mode)),
            Layer::BatchNorm(l) => l.forward(x, mode),
            Layer::Activation(l) => Ok(l.forward(x, mode)),
        }
    }

    pub(crate) fn backward(&mut self, grad: &Matrix) -> Result<Matrix> {
        match self {
            Layer::Dense(l) => l.backward(grad),
            Layer::BatchNorm(l) => l.backward(grad),
            Layer::Activation(l) => l.backward(grad),
        }
    }

    pub(crate) fn clear_cache(&mut self) {
        match self {
            Layer::Dense(l) => l.clear_cache(),
            Layer::BatchNorm(l) => l.clear_cache(),
            Layer::Activation(l) => l.cache = None,
        }
    }

    /// Output width given the input width.
    pub fn output_width(&self, input: usize) -> usize {
        match self {
            Layer::Dense(l) => l.out_dim(),
            Layer::BatchNorm(l) => l.width(),
            Layer::Activation(_) => input,
        }
    }

    /// Width the layer requires of its input, if it constrains it.
    pub fn required_input(&self) -> Option<usize> {
        match self {
            Layer::Dense(l) => Some(l.in_dim()),
            Layer::BatchNorm(l) => Some(l.width()),
            Layer::Activation(_) => None,
        }
    }

    pub(crate) fn param_slices(&self) -> Vec<&[f64]> {
        match self {
            Layer::Dense(l) => vec![l.weights.as_slice(), l.bias.as_slice()],
            Layer::BatchNorm(l) => vec![l.gamma.as_slice(), l.beta_shift.as_slice()],
            Layer::Activation(_) => Vec::new(),
        }
    }

    pub(crate) fn grad_slices(&self) -> Vec<&[f64]> {
        match self {
            Layer::Dense(l) => vec![l.grad_weights.as_slice(), l.grad_bias.as_slice()],
            Layer::BatchNorm(l) => vec![l.grad_gamma.as_slice(), l.grad_beta.as_slice()],
            Layer::Activation(_) => Vec::new(),
        }
    }

    /// `(parameters, gradients)` slice pairs in a fixed order.
    pub(crate) fn param_grad_pairs(&mut self) -> Vec<(&mut [f64], &mut [f64])> {
        match self {
            Layer::Dense(l) => vec![
                (l.weights.as_mut_slice(), l.grad_weights.as_mut_slice()),
                (l.bias.as_mut_slice(), l.grad_bias.as_mut_slice()),
            ],
            Layer::BatchNorm(l) => vec![
                (l.gamma.as_mut_slice(), l.grad_gamma.as_mut_slice()),
                (l.beta_shift.as_mut_slice(), l.grad_beta.as_mut_slice()),
            ],
            Layer::Activation(_) => Vec::new(),
        }
    }
}
