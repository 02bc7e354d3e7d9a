use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("polytope is not a C-set: offset {index} is {value} (must be > 0)")]
    NotCSet { index: usize, value: f64 },

    #[error("polytope is empty")]
    Empty,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contractive set synthesis failed at iteration {iteration}: {reason}")]
    SynthesisFailed { iteration: usize, reason: String },

    #[error("contractive iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("no path to the terminal node from {0}")]
    NoPath(String),

    #[error("state is outside the domain of attraction (gauge {gauge} > a_max {a_max})")]
    OutsideDomain { gauge: f64, a_max: f64 },

    #[error("target set not reached within {0} steps")]
    NonTermination(usize),

    #[error("edge certificate violated: {0}")]
    EdgeCertificate(String),

    #[error("internal error: {0}")]
    Internal(String),
}
