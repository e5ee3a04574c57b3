use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or semantically invalid input document.
    #[error("{location}: {message}")]
    Format { location: String, message: String },

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("payoff vector has {got} entries, instance has {expected} agents")]
    PayoffLength { expected: usize, got: usize },

    #[error("negative payoff for agent `{0}`")]
    NegativePayoff(String),

    #[error("instance is not a star (one side must be a single vertex)")]
    NotAStar,

    #[error("payoff vector is not an imputation")]
    NotAnImputation,

    #[error("{what} is {size}, above the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("non-integral {0}")]
    NonIntegral(String),

    #[error("knapsack item {0} has weight 0")]
    ZeroItemWeight(usize),

    #[error("star has no leaves")]
    NoLeaves,

    #[error("gadget precondition failed: {0}")]
    Precondition(String),

    #[error("instance carries no {0} provenance")]
    MissingProvenance(&'static str),

    #[error("infeasible b-matching: {0}")]
    InfeasibleMatching(String),

    #[error("value does not fit the scalar type: {0}")]
    Unrepresentable(String),
}

impl Error {
    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn guard(what: &'static str, size: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::TooLarge {
            what,
            size: size.into(),
            limit: limit.into(),
        }
    }
}
