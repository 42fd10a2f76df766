//! The end-to-end learned link: an encoder network at the transmitter, a
//! beam-selector network at the RIS, and a decoder network at the receiver,
//! trained jointly through the cascaded channel
//!
//! ```text
//! s ─ encoder ─ power norm ─ x ─ h_tr ─ RIS(ψ, κ) ─ h_riᵀ ─ + n ─ decoder ─ ŝ
//!                                 └─ selector(x, h_ri) ─ ψ ┘
//! ```
//!
//! During training the selector's softmax output mixes the codewords
//! (`Ψ_eff = Σ_p w_p Ψ_p`) so every network receives gradients; at
//! inference the selector's argmax picks a single codeword.

mod chain;
mod config;
mod eval;
mod model;
mod train;

pub use chain::{ChainGrads, ChainOutput, LossParts};
pub use config::{
    Architecture, BeamPolicy, BeamRanking, EncoderInput, Message, Scenario, SelectorMode,
    TrainConfig,
};
pub use eval::{evaluate_ser, SerEvaluator};
pub use model::EndToEndModel;
pub use train::{train, train_from, train_with_observer, IterationReport, LossRecord};
