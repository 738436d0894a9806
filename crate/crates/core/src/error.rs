use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("not a contraction: operator norm {norm} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("witness does not re-certify: stored {stored}, recomputed {recomputed}")]
    Certification { stored: f64, recomputed: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Certification { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
