use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: instance has {expected} loanees, assignment has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("action {action} for loanee {loanee} is outside 1..={n_actions}")]
    ActionOutOfRange {
        loanee: usize,
        action: usize,
        n_actions: usize,
    },

    #[error("bit block of loanee {loanee} is not one-hot")]
    NotOneHot { loanee: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("loanee {0} is not part of the instance")]
    UnknownLoanee(usize),

    #[error("exhaustive search over {size:e} assignments exceeds the limit of {limit:e}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },

    #[error("no assignment satisfies the provision cap {cap}")]
    Infeasible { cap: f64 },

    #[error("dense reference needs {qubits} qubits, limit is {limit}")]
    DenseTooLarge { qubits: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Guard violations and infeasible caps are reported separately from
    /// malformed input by the command-line driver.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::SearchSpaceTooLarge { .. }
                | Error::Infeasible { .. }
                | Error::DenseTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
