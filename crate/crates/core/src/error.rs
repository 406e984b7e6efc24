use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid density matrix: {invariant} violated (magnitude {magnitude:.3e})")]
    InvalidState {
        invariant: &'static str,
        magnitude: f64,
    },

    #[error("non-physical output: minimum eigenvalue {0:.3e} below clamping window")]
    NonPhysical(f64),

    #[error("unsupported rank {0}: only states of rank <= 2 admit the two-qubit environment")]
    UnsupportedRank(usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("formula out of range: {0}")]
    FormulaOutOfRange(String),

    #[error("catalyst not returned: marginal residual {0:.3e}")]
    CatalystNotReturned(f64),

    #[error("bound out of range: {0}")]
    BoundOutOfRange(String),

    #[error("degenerate Kraus operator: post-selection probability is zero")]
    DegenerateKraus,

    #[error("net too large: estimated {0} points")]
    NetTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad user input rather than a numerical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidArgument(_)
                | Error::InvalidMatrix(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidState { .. }
        )
    }
}
