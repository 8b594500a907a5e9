//! Self-contained numerical kernels used by the regression and selection
//! stages: a small dense matrix type, an SPD solver, a cyclic Jacobi
//! eigen-solver, correlation helpers, and the Student-t / Fisher-F upper
//! tails built on the regularized incomplete beta function.

mod eigen;
mod linalg;
mod matrix;
mod special;
mod stats;

pub use eigen::{eigen_symmetric, SymmetricEigen};
pub use linalg::{solve_spd, Cholesky};
pub use matrix::Matrix;
pub use special::{f_pvalue, ln_gamma, regularized_incomplete_beta, t_pvalue_two_sided};
pub use stats::{correlation_matrix, mean, pearson, sample_variance, standardize};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("collinear predictors: column {column} is numerically dependent on earlier columns")]
    Collinear { column: usize },

    #[error("constant column {column}: zero variance")]
    ConstantColumn { column: usize },

    #[error("need at least {needed} observations, got {found}")]
    TooFewObservations { needed: usize, found: usize },

    #[error("degrees of freedom must be positive")]
    InvalidDegreesOfFreedom,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
