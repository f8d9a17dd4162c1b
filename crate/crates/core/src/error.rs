use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The operation is not allowed in the current protocol state
    /// (e.g. a sender measuring twice).
    #[error("invalid state: {0}")]
    State(String),
    /// The request exceeds the simulator's size limits.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// The receiver has no final state because the protocol did not finish.
    #[error("protocol incomplete: {0}")]
    ProtocolIncomplete(String),
    /// A numerical self-check did not hold.
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! arg_err {
    ($($t:tt)*) => { $crate::error::Error::Argument(format!($($t)*)) };
}
pub(crate) use arg_err;
