use thiserror::Error;

/// Errors produced by the simulator, the analytic routines and the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A combined transmit-and-listen action was issued under the weak model.
    #[error("station {station} issued TransmitListen under the weak no-CD model")]
    ModelViolation { station: usize },

    /// More than one station claims leadership after a round.
    #[error("integrity violation: stations {first} and {second} both claim leadership")]
    Integrity { first: usize, second: usize },

    /// The tuning parameter makes the expected-time double sum diverge.
    #[error("alpha = {alpha} is outside the convergent range (1, {sup})")]
    Boundary { alpha: f64, sup: f64 },

    /// A round's inner loop is too long to enumerate or to represent.
    #[error("inner loop length {len} exceeds the cap {cap}")]
    Overflow { len: f64, cap: u64 },

    /// Not enough samples to support the requested statistic.
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: u64, got: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
