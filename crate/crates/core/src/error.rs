use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} got {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix entries must be finite (entry {index} is {value})")]
    NonFinite { index: usize, value: String },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operator norm {norm} exceeds 1")]
    NormExceedsOne { norm: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("SVD failed to converge")]
    Convergence,
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("basis is not a *-algebra: {0}")]
    NotStarAlgebra(String),
    #[error("map is not a Jordan *-homomorphism (residual {residual:e})")]
    NotJordan { residual: f64 },
    #[error("map is not unital (residual {residual:e})")]
    NotUnital { residual: f64 },
    #[error("image of the first diagonal matrix unit is numerically zero (norm {norm:e})")]
    RankDeficient { norm: f64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
