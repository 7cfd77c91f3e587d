//! Sparse symmetric matrices, direct solves and the generalized eigensolver.

mod eigen;
mod factor;
mod sparse;

pub use eigen::{eigs_smallest, eigs_smallest_with, EigenOptions, EigenPair, Normalization};
pub use factor::{factor_solve, Factorization, SOLVE_TOLERANCE};
pub use sparse::{dot, norm2, SparseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("empty system")]
    Empty,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),
    #[error("matrix is singular to working precision: {0}")]
    Singular(String),
    #[error("asked for {requested} eigenpairs of a {dim}-dimensional problem")]
    TooManyEigenpairs { requested: usize, dim: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e}): {reason}")]
    NotConverged {
        iterations: usize,
        residual: f64,
        reason: String,
    },
}
