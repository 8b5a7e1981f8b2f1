//! Text checkpoint format.
//!
//! ```text
//! FAIRPEN-CKPT-v1
//! input <width>
//! dense <in> <out>
//! w <hex> <hex> ...
//! b <hex> ...
//! batchnorm <width> <momentum-hex> <epsilon-hex>
//! gamma ... / beta ... / mean ... / var ...
//! act relu|sigmoid|identity
//! end
//! ```
//!
//! Every `f64` is written as the 16-digit hex of its IEEE-754 bits, so a
//! save/load round trip is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::layers::{Activation, ActivationLayer, BatchNormLayer, DenseLayer, Layer};
use super::matrix::Matrix;
use super::mlp::Mlp;
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &str = "FAIRPEN-CKPT-v1";

fn push_values(out: &mut String, tag: &str, values: &[f64]) {
    out.push_str(tag);
    for v in values {
        write!(out, " {:016x}", v.to_bits()).expect("writing to a String");
    }
    out.push('\n');
}

impl Mlp {
    pub fn to_checkpoint_string(&self) -> String {
        let mut out = String::new();
        out.push_str(CHECKPOINT_MAGIC);
        out.push('\n');
        writeln!(out, "input {}", self.input_width()).unwrap();
        for layer in self.layers() {
            match layer {
                Layer::Dense(d) => {
                    writeln!(out, "dense {} {}", d.in_dim(), d.out_dim()).unwrap();
                    push_values(&mut out, "w", d.weights.as_slice());
                    push_values(&mut out, "b", &d.bias);
                }
                Layer::BatchNorm(b) => {
                    writeln!(out, "batchnorm {} {:016x} {:016x}", b.width(), b.momentum.to_bits(), b.epsilon.to_bits())
                        .unwrap();
                    push_values(&mut out, "gamma", &b.gamma);
                    push_values(&mut out, "beta", &b.beta_shift);
                    push_values(&mut out, "mean", &b.running_mean);
                    push_values(&mut out, "var", &b.running_var);
                }
                Layer::Activation(a) => {
                    writeln!(out, "act {}", a.kind().name()).unwrap();
                }
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parses a checkpoint; `origin` names the source in error messages.
    pub fn from_checkpoint_str(text: &str, origin: &Path) -> Result<Mlp> {
        let err = |message: String| Error::Checkpoint { path: origin.to_path_buf(), message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == CHECKPOINT_MAGIC => {}
            Some((_, l)) => return Err(err(format!("bad magic header {:?}, expected {CHECKPOINT_MAGIC:?}", l))),
            None => return Err(err("empty file".into())),
        }

        let mut next = |expect: &str| -> Result<(usize, Vec<String>)> {
            let (i, line) = lines.next().ok_or_else(|| err(format!("unexpected end of file, expected '{expect}'")))?;
            Ok((i + 1, line.split_whitespace().map(str::to_owned).collect()))
        };
        let parse_usize = |tok: Option<&String>, line: usize| -> Result<usize> {
            tok.and_then(|t| t.parse().ok()).ok_or_else(|| err(format!("line {line}: expected an integer")))
        };
        let parse_hex = |tok: &str, line: usize| -> Result<f64> {
            u64::from_str_radix(tok, 16).map(f64::from_bits).map_err(|_| err(format!("line {line}: bad value {tok:?}")))
        };
        let values = |tag: &str, len: usize, next: &mut dyn FnMut(&str) -> Result<(usize, Vec<String>)>| {
            let (line, toks) = next(tag)?;
            if toks.first().map(String::as_str) != Some(tag) {
                return Err(err(format!("line {line}: expected '{tag}'")));
            }
            if toks.len() - 1 != len {
                return Err(err(format!("line {line}: '{tag}' has {} values, expected {len}", toks.len() - 1)));
            }
            toks[1..].iter().map(|t| parse_hex(t, line)).collect::<Result<Vec<f64>>>()
        };

        let (line, toks) = next("input")?;
        if toks.first().map(String::as_str) != Some("input") {
            return Err(err(format!("line {line}: expected 'input'")));
        }
        let input_width = parse_usize(toks.get(1), line)?;

        let mut layers = Vec::new();
        loop {
            let (line, toks) = next("layer or end")?;
            match toks.first().map(String::as_str) {
                Some("end") => break,
                Some("dense") => {
                    let in_dim = parse_usize(toks.get(1), line)?;
                    let out_dim = parse_usize(toks.get(2), line)?;
                    let w = values("w", in_dim * out_dim, &mut next)?;
                    let b = values("b", out_dim, &mut next)?;
                    let weights = Matrix::from_vec(out_dim, in_dim, w)?;
                    layers.push(Layer::Dense(DenseLayer::from_parameters(weights, b)?));
                }
                Some("batchnorm") => {
                    let width = parse_usize(toks.get(1), line)?;
                    let momentum = parse_hex(toks.get(2).map_or("", String::as_str), line)?;
                    let epsilon = parse_hex(toks.get(3).map_or("", String::as_str), line)?;
                    let mut bn = BatchNormLayer::with_hyperparameters(width, momentum, epsilon);
                    bn.gamma = values("gamma", width, &mut next)?;
                    bn.beta_shift = values("beta", width, &mut next)?;
                    bn.running_mean = values("mean", width, &mut next)?;
                    bn.running_var = values("var", width, &mut next)?;
                    if bn.running_var.iter().any(|v| *v < 0.0) {
                        return Err(err(format!("line {line}: negative running variance")));
                    }
                    layers.push(Layer::BatchNorm(bn));
                }
                Some("act") => {
                    let kind = toks
                        .get(1)
                        .and_then(|n| Activation::from_name(n))
                        .ok_or_else(|| err(format!("line {line}: unknown activation")))?;
                    layers.push(Layer::Activation(ActivationLayer::new(kind)));
                }
                other => return Err(err(format!("line {line}: unknown record {other:?}"))),
            }
        }
        Mlp::from_layers(input_width, layers).map_err(|e| err(e.to_string()))
    }
}

pub fn save_checkpoint(net: &Mlp, path: &Path) -> Result<()> {
    std::fs::write(path, net.to_checkpoint_string())?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Mlp> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Checkpoint { path: path.to_path_buf(), message: e.to_string() })?;
    Mlp::from_checkpoint_str(&text, path)
}
