//! Feed-forward network engine with exact manual backpropagation.

mod checkpoint;
mod layers;
mod loss;
mod matrix;
mod mlp;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC};
pub use layers::{sigmoid, Activation, ActivationLayer, BatchNormLayer, DenseLayer, Layer, Mode};
pub use loss::{bce_loss, clamp_probability, mae_loss, LossEval, PROB_CLAMP};
pub(crate) use loss::{log1m_clamped, log_clamped};
pub use matrix::Matrix;
pub use mlp::{Direction, LayerSpec, Mlp, Sgd};
