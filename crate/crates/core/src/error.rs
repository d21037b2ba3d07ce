use thiserror::Error;

/// Errors raised by the simulator and its oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected {expected} matrix entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument {value} outside validated range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("trace drifted by {drift:e} at t = {time:e} s; reduce dt_max")]
    TraceDrift { drift: f64, time: f64 },

    #[error("phase grid of {grid_size} points cannot resolve modes up to |m| = {max_mode}; need at least {required}")]
    GridTooSmall {
        grid_size: usize,
        max_mode: usize,
        required: usize,
    },

    #[error("{n_periods} repetitions do not cover one beat cycle; need at least {required}")]
    TooFewPeriods { n_periods: usize, required: usize },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
