use thiserror::Error;

use crate::validate::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("hamiltonian is not Hermitian (relative deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("singular matrix in linear solve (pivot column {0})")]
    Singular(usize),

    #[error("scaling and squaring would need {0} squarings (limit 64)")]
    TooManySquarings(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid initial state: {0:?}")]
    InvalidState(ValidationReport),

    #[error("kernel variant `{0}` is not available on this build or CPU")]
    VariantUnavailable(&'static str),

    #[error(
        "timer resolution {resolution_ns} ns is coarser than 10% of the {block_ns} ns timed block"
    )]
    TimerResolution { resolution_ns: u64, block_ns: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
