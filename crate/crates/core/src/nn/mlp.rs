use rand::Rng;

use super::layers::{Activation, ActivationLayer, BatchNormLayer, DenseLayer, Layer, Mode};
use super::matrix::Matrix;
use crate::{Error, Result};

/// Architecture description of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Dense(usize),
    BatchNorm,
    Activation(Activation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Plain stochastic gradient descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sgd {
    pub learning_rate: f64,
}

impl Sgd {
    pub fn new(learning_rate: f64) -> Result<Self> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be positive, got {learning_rate}")));
        }
        Ok(Self { learning_rate })
    }
}

/// A feed-forward stack of dense, batch-norm and activation layers.
#[derive(Debug, Clone)]
pub struct Mlp {
    input_width: usize,
    layers: Vec<Layer>,
    primed: bool,
}

impl Mlp {
    pub fn from_layers(input_width: usize, layers: Vec<Layer>) -> Result<Self> {
        let mut width = input_width;
        for (i, layer) in layers.iter().enumerate() {
            if let Some(req) = layer.required_input() {
                if req != width {
                    return Err(Error::dim("Mlp layer input", width, format!("{req} (layer {i})")));
                }
            }
            width = layer.output_width(width);
        }
        Ok(Self { input_width, layers, primed: false })
    }

    pub fn new<R: Rng + ?Sized>(input_width: usize, specs: &[LayerSpec], rng: &mut R) -> Result<Self> {
        let mut width = input_width;
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let layer = match *spec {
                LayerSpec::Dense(out) => {
                    if out == 0 {
                        return Err(Error::Config("dense layer width must be > 0".into()));
                    }
                    Layer::Dense(DenseLayer::new(width, out, rng))
                }
                LayerSpec::BatchNorm => Layer::BatchNorm(BatchNormLayer::new(width)),
                LayerSpec::Activation(a) => Layer::Activation(ActivationLayer::new(a)),
            };
            width = layer.output_width(width);
            layers.push(layer);
        }
        Self::from_layers(input_width, layers)
    }

    /// `[Dense(w) - (BN) - ReLU] * hidden.len() - Dense(1) - head`.
    pub fn feed_forward<R: Rng + ?Sized>(
        input_width: usize,
        hidden: &[usize],
        batch_norm: bool,
        head: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        Self::new(input_width, &Self::block_specs(hidden, batch_norm, head), rng)
    }

    pub fn block_specs(hidden: &[usize], batch_norm: bool, head: Activation) -> Vec<LayerSpec> {
        let mut specs = Vec::new();
        for &w in hidden {
            specs.push(LayerSpec::Dense(w));
            if batch_norm {
                specs.push(LayerSpec::BatchNorm);
            }
            specs.push(LayerSpec::Activation(Activation::Relu));
        }
        specs.push(LayerSpec::Dense(1));
        specs.push(LayerSpec::Activation(head));
        specs
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers.iter().fold(self.input_width, |w, l| l.output_width(w))
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::Dense(d) => LayerSpec::Dense(d.out_dim()),
                Layer::BatchNorm(_) => LayerSpec::BatchNorm,
                Layer::Activation(a) => LayerSpec::Activation(a.kind()),
            })
            .collect()
    }

    pub fn forward(&mut self, batch: &Matrix, mode: Mode) -> Result<Matrix> {
        if batch.cols() != self.input_width {
            return Err(Error::dim("Mlp::forward input width", self.input_width, batch.cols()));
        }
        let mut x = batch.clone();
        for layer in &mut self.layers {
            x = layer.forward(&x, mode)?;
        }
        if !x.is_finite() {
            return Err(Error::State("non-finite network output".into()));
        }
        self.primed = mode == Mode::Train;
        Ok(x)
    }

    /// Inference-mode forward that leaves every cache and statistic untouched.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        self.clone().forward(batch, Mode::Inference)
    }

    /// Backpropagates `upstream` (d loss / d output), accumulating parameter
    /// gradients, and returns d loss / d input.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<Matrix> {
        if !self.primed {
            return Err(Error::State("backward requires a prior train-mode forward".into()));
        }
        let out = self.output_width();
        if upstream.cols() != out {
            return Err(Error::dim("Mlp::backward upstream width", out, upstream.cols()));
        }
        let mut g = upstream.clone();
        for layer in self.layers.iter_mut().rev() {
            g = layer.backward(&g)?;
        }
        Ok(g)
    }

    pub fn zero_grad(&mut self) {
        for layer in &mut self.layers {
            for (_, g) in layer.param_grad_pairs() {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }

    /// `params -= lr * grad` (or `+=` when maximizing), then clears gradients.
    pub fn sgd_step(&mut self, opt: &Sgd, direction: Direction) {
        let step = match direction {
            Direction::Minimize => -opt.learning_rate,
            Direction::Maximize => opt.learning_rate,
        };
        for layer in &mut self.layers {
            for (p, g) in layer.param_grad_pairs() {
                for (pi, gi) in p.iter_mut().zip(g.iter_mut()) {
                    *pi += step * *gi;
                    *gi = 0.0;
                }
            }
        }
    }

    pub fn clear_caches(&mut self) {
        self.layers.iter_mut().for_each(Layer::clear_cache);
        self.primed = false;
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().flat_map(Layer::param_slices).map(<[f64]>::len).sum()
    }

    /// All trainable parameters, flattened layer by layer.
    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Layer::param_slices).flatten().copied().collect()
    }

    pub fn grads(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Layer::grad_slices).flatten().copied().collect()
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        let n = self.param_count();
        if values.len() != n {
            return Err(Error::dim("Mlp::set_params", n, values.len()));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for (p, _) in layer.param_grad_pairs() {
                p.copy_from_slice(&values[offset..offset + p.len()]);
                offset += p.len();
            }
        }
        Ok(())
    }

    /// Running batch-norm statistics, flattened (mean then var per layer).
    pub fn running_stats(&self) -> Vec<f64> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                Layer::BatchNorm(b) => Some(b.running_mean().iter().chain(b.running_var()).copied()),
                _ => None,
            })
            .flatten()
            .collect()
    }
}
