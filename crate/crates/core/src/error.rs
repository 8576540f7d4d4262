use thiserror::Error;

use crate::word::ParseWordError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseWordError),
    #[error("dimension mismatch: order {0} against order {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(String),
    #[error("matrix is singular")]
    Singular,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("spectrum is not rational and simple ({0}); use the floating-point path")]
    IrrationalSpectrum(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("matrices do not commute")]
    NotCommuting,
    #[error("homotopy scan inconclusive: finest level {finest_level} ({points} grid points)")]
    ScanExhausted { finest_level: u32, points: usize },
    #[error("witness {name}: {reason}")]
    InvalidWitness { name: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
