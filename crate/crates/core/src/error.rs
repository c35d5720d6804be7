use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reserved for malformed input, exhausted guards and violated
/// preconditions. Semantic check failures are report content instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("G-sets are over different groups")]
    GroupMismatch,

    #[error("capacity exceeded: {guard} (limit {limit}, requested {requested})")]
    Capacity {
        guard: &'static str,
        limit: String,
        requested: String,
    },

    #[error("theorem necessity violated: G_M ⊄ G_X")]
    KernelCondition,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn capacity(
        guard: &'static str,
        limit: impl ToString,
        requested: impl ToString,
    ) -> Self {
        Error::Capacity {
            guard,
            limit: limit.to_string(),
            requested: requested.to_string(),
        }
    }
}
