use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Expression text could not be parsed.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A user-supplied function failed to evaluate, or produced a non-finite value.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// The iteration hit its cap without satisfying the stopping rule.
    #[error("no convergence after {iterations} iterations (last residual {residual:.4e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A convergence-study row failed; carries the grid size of the row.
    #[error("study row N = {n}: {source}")]
    StudyRow {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
