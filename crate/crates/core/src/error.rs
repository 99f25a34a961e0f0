use thiserror::Error;

/// Errors raised by the simulator, the estimator, and the file front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate machine parameters: {0}")]
    DegenerateParameters(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no steady-state operating point: {0}")]
    NoSolution(String),

    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("implicit step did not converge after {iterations} iterations at t = {t}")]
    NonConvergence { iterations: usize, t: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("linearized system is rank deficient (rank {rank} < {cols})")]
    RankDeficient { rank: usize, cols: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad numerics rather than bad input files.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateParameters(_)
                | Error::NoSolution(_)
                | Error::SingularMatrix(_)
                | Error::NonConvergence { .. }
                | Error::NonFinite(_)
                | Error::DimensionMismatch { .. }
                | Error::RankDeficient { .. }
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
