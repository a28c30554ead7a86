use thiserror::Error;

/// Errors raised when constructing problems, networks or configurations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A size or count parameter is outside the supported range.
    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        expected: &'static str,
    },
    /// The exact oracle would need to enumerate too large a space.
    #[error("oracle infeasible: {what} = {value} exceeds the limit of {limit}")]
    OracleInfeasible {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    /// A structure handed in from outside violates one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid {
        what: &'static str,
        reason: &'static str,
    },
    /// Average path length is undefined on a disconnected network.
    #[error("network is disconnected")]
    Disconnected,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
