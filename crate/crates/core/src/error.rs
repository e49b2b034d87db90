use thiserror::Error;

/// Errors produced by the library. Each variant maps onto one of the CLI's
/// exit classes (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An enumeration would exceed the caller's budget. `required` is the
    /// exact number of items (a binomial coefficient in decimal).
    #[error("budget exceeded: {what} needs {required} items, budget is {budget}")]
    Budget {
        what: String,
        required: String,
        budget: u64,
    },

    /// The ground set is too large for the three-color pipeline at this `l`.
    #[error(
        "n-exceeds-tower-bound: N = {n} is not admissible for l = {l}; \
         the largest admissible N has {max_bits} bits"
    )]
    TowerBound { n: u64, l: usize, max_bits: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("malformed code: {0}")]
    MalformedCode(String),

    /// A structural property that should always hold was observed to fail.
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Unsupported(_) => "unsupported",
            Error::Budget { .. } => "budget-error",
            Error::TowerBound { .. } => "n-exceeds-tower-bound",
            Error::Range(_) => "range-error",
            Error::MalformedCode(_) => "malformed-code",
            Error::InternalConsistency(_) => "internal-consistency",
        }
    }

    /// 2 = validation, 3 = budget, 4 = internal consistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::InternalConsistency(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
