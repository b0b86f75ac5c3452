use thiserror::Error;

/// Errors raised by the numerical layer (operators, models, metrics, verification).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operators live on different grids")]
    GridMismatch,

    #[error("operator is not Hermitian (relative defect {0:.3e})")]
    NotHermitian(f64),

    #[error("non-positive eigenvalue {0:.3e} under a fractional power")]
    NonPositiveSpectrum(f64),

    #[error("conditioning guard: ratio {ratio:.3e} exceeds {limit:.1e}")]
    Overflow { ratio: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("differential operator of order {0} has no three-point realization")]
    UnsupportedOrder(usize),

    #[error("rank-deficient dictionary (smallest/largest singular value {0:.3e})")]
    RankDeficient(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
