//! A small feed-forward network engine: dense layers, ReLU/linear/softmax
//! activations, categorical cross-entropy, backpropagation, Adam, the
//! parameter-free average-power normalization layer, and a central
//! finite-difference gradient checker.
//!
//! Everything is real-valued; complex samples cross into a network as
//! interleaved `(re, im)` columns.

mod adam;
pub mod gradcheck;
mod loss;
mod matrix;
mod mlp;
mod power_norm;

pub use adam::{AdamConfig, AdamState, LrSchedule};
pub use loss::{cross_entropy, softmax_cross_entropy_grad, LOG_CLAMP};
pub use matrix::Matrix;
pub use mlp::{
    softmax_backward, Activation, Backward, Dense, ForwardCache, LayerGrads, LayerSpec, Mlp,
    MlpGrads,
};
pub use power_norm::{power_normalize, power_normalize_backward, PowerNormCache};
