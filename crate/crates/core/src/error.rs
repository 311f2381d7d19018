use thiserror::Error;

use crate::sdp::SdpStatus;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace condition violated (deviation {deviation:.3e})")]
    TraceCondition { deviation: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed problem: {0}")]
    Malformed(String),

    #[error("SDP solver finished with status {status} after {iterations} iterations")]
    Solver { status: SdpStatus, iterations: usize },

    #[error("extracted map reaches {recomputed:.3e}, SDP reported {reported:.3e}")]
    Verification { reported: f64, recomputed: f64 },

    #[error("bound violated: {0}")]
    BoundViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
