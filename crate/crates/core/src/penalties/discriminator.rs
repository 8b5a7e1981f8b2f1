use rand::Rng;

use crate::nn::{Activation, Matrix, Mlp};
use crate::{Error, Result};

fn check_head(net: &Mlp, expected_input: usize, what: &'static str) -> Result<()> {
    if net.input_width() != expected_input {
        return Err(Error::dim(what, expected_input, net.input_width()));
    }
    if net.output_width() != 1 {
        return Err(Error::dim(what, 1, net.output_width()));
    }
    Ok(())
}

/// `D(s, a)`: input is the score followed by the encoded attributes.
#[derive(Debug, Clone)]
pub struct GspDiscriminator {
    pub net: Mlp,
}

impl GspDiscriminator {
    /// `[Dense(w) - (BN) - ReLU] * hidden - Dense(1) - Sigmoid` on `1 + l` inputs.
    pub fn new<R: Rng + ?Sized>(l: usize, hidden: &[usize], batch_norm: bool, rng: &mut R) -> Result<Self> {
        Ok(Self { net: Mlp::feed_forward(1 + l, hidden, batch_norm, Activation::Sigmoid, rng)? })
    }

    pub fn from_net(net: Mlp, l: usize) -> Result<Self> {
        check_head(&net, 1 + l, "GspDiscriminator input width")?;
        Ok(Self { net })
    }

    pub fn attr_width(&self) -> usize {
        self.net.input_width() - 1
    }

    /// `D` at each `(s_i, a_i)` row, inference mode.
    pub fn probabilities(&self, s: &[f64], a: &Matrix) -> Result<Vec<f64>> {
        Ok(self.net.predict(&gsp_input(s, a)?)?.into_vec())
    }
}

/// `D(s, a, y)`: input is the score, the encoded attributes, then the outcome.
#[derive(Debug, Clone)]
pub struct GeoDiscriminator {
    pub net: Mlp,
}

impl GeoDiscriminator {
    pub fn new<R: Rng + ?Sized>(l: usize, hidden: &[usize], batch_norm: bool, rng: &mut R) -> Result<Self> {
        Ok(Self { net: Mlp::feed_forward(2 + l, hidden, batch_norm, Activation::Sigmoid, rng)? })
    }

    pub fn from_net(net: Mlp, l: usize) -> Result<Self> {
        check_head(&net, 2 + l, "GeoDiscriminator input width")?;
        Ok(Self { net })
    }

    pub fn attr_width(&self) -> usize {
        self.net.input_width() - 2
    }

    pub fn probabilities(&self, s: &[f64], a: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.net.predict(&geo_input(s, a, y)?)?.into_vec())
    }
}

pub(crate) fn gsp_input(s: &[f64], a: &Matrix) -> Result<Matrix> {
    Matrix::column(s.to_vec()).hcat(a)
}

pub(crate) fn geo_input(s: &[f64], a: &Matrix, y: &[f64]) -> Result<Matrix> {
    gsp_input(s, a)?.hcat(&Matrix::column(y.to_vec()))
}
