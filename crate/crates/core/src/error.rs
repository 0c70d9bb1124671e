use thiserror::Error;

use crate::iterate::IterationHistory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not positive definite (p'Ap = {curvature:e} at CG iteration {iteration})")]
    NotSpd { iteration: usize, curvature: f64 },

    #[error("inner solver did not converge: {iterations} iterations, relative residual {rel_residual:e}")]
    InnerSolverFailure { iterations: usize, rel_residual: f64 },

    #[error("problem too large for dense oracle: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("singular system (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },

    /// An outer iteration stopped on an inner failure; the iterates up to that point are kept.
    #[error("iteration aborted after {} outer steps: {source}", .history.iterations)]
    Aborted {
        history: Box<IterationHistory>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
