use thiserror::Error;

/// Errors raised by frame, refinement and Fourier-domain computations.
///
/// Variants fall in two groups: malformed input ([`Error::is_input`]) and
/// numerical failures such as a singular cross-Gram matrix or a vanishing
/// bracket product.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ambient dimension {0} exceeds the supported maximum of {max}", max = crate::linalg::MAX_DIM)]
    TooLarge(usize),

    #[error("vectors do not lie in the declared subspace (residual {residual:.3e})")]
    NotInSubspace { residual: f64 },

    #[error(
        "direct sum fails: smallest singular value of the cross-Gram matrix is {sigma_min:.3e}"
    )]
    DirectSumFailure { sigma_min: f64 },

    #[error("numerical rank {rank} is below the subspace dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("defect {defect:.6} is not below 1; the Neumann series is not guaranteed to converge")]
    RefinementNotGuaranteed { defect: f64 },

    #[error("operator is numerically singular")]
    Singular,

    #[error("bracket product is singular: |bracket| = {min_abs:.3e} on the support of the self-bracket")]
    SingularSymbol { min_abs: f64 },

    #[error("tail majorant is not summable to the requested tolerance: {0}")]
    NonSummableTail(String),

    #[error("the non-zero set of the self-bracket is empty on the grid")]
    EmptySupport,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-range input.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidInput(_)
                | Error::TooLarge(_)
                | Error::NotInSubspace { .. }
                | Error::NonSummableTail(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::InvalidInput(format!("csv: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
