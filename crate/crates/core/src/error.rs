use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix of {rows} x {cols} entries exceeds the cap of {cap} entries")]
    SizeCap { rows: u128, cols: u128, cap: u128 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("singular system")]
    Singular,

    #[error("matrix has rank {rank} but {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("simplex exceeded the iteration cap of {0}")]
    IterationCap(usize),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("certificate check failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn mismatch(expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
