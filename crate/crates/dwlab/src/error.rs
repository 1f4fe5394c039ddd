use thiserror::Error;

/// Errors produced by the laboratory.
///
/// `Validation` marks bad inputs (rejected before any numerics run),
/// everything else marks a numerical failure of an otherwise valid request.
#[derive(Error, Debug)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),

    #[error("numerical: {0}")]
    Numerical(String),

    /// The principal branch root is undefined on (-inf, 0]; the caller must
    /// perturb the argument off the cut.
    #[error("branch cut: {0} lies on (-inf, 0]")]
    BranchCut(num_complex::Complex64),

    /// A state vector lacks the witness needed for the range-norm formula.
    #[error("missing witness: state was not produced by make_k_data; generate K-data to attach one")]
    MissingWitness,

    #[error("iteration did not converge: {what} after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code convention: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
