//! Simulation core for end-to-end learned links over a reconfigurable
//! intelligent surface (RIS).
//!
//! The crate is `no_std` and only needs `alloc`. It contains every numeric
//! building block of the link: seeded random streams, the single-path array
//! channel, 1-bit RIS codebooks, a small feed-forward network engine with
//! backpropagation and Adam, the jointly trained encoder / beam selector /
//! decoder model, and the QPSK reference system.
//!
//! File formats, the CLI and thread-parallel evaluation live in the `risae`
//! companion crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod autoencoder;
pub mod baseline;
pub mod channel;
mod error;
pub(crate) mod math;
pub mod neural;
pub mod numerics;
pub mod ris;

pub use error::{Error, Result};
pub use numerics::{ComplexVector, RngStream, C64};
