use thiserror::Error;

/// Errors raised by parameter validation and dimension checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("number of subcarriers {0} must be a power of two in 2..=16")]
    InvalidSubcarrierCount(usize),
    #[error("PSK order {0} must be a power of two >= 2")]
    InvalidPskOrder(usize),
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("active subcarrier count {t} out of range 1..={max}")]
    ActiveCountOutOfRange { t: usize, max: usize },
    #[error("expected {expected} bits, got {actual}")]
    BitLength { expected: usize, actual: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("empty codebook")]
    EmptyCodebook,
    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;
