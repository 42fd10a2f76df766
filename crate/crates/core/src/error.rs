use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("vector must contain at least one entry")]
    Empty,
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("all-zero batch cannot be power normalized")]
    DegenerateBatch,
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("cache does not belong to the current parameters")]
    StaleCache,
    #[error("message {value} out of range for k = {k_bits}")]
    InvalidMessage { value: u32, k_bits: u32 },
    #[error("training diverged at iteration {iteration} (loss is not finite)")]
    Divergence { iteration: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
