use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is not planar")]
    NotPlanar,

    #[error("graph is not 2-connected")]
    NotBiconnected,

    #[error("pattern has {0} vertices, at most {max} supported", max = crate::matcher::MAX_PATTERN)]
    PatternTooLarge(usize),

    #[error("bag of {0} vertices exceeds the supported maximum of 64")]
    BagTooLarge(usize),

    #[error("pattern graph is disconnected")]
    DisconnectedPattern,

    #[error("oracle budget exceeded: {0}")]
    Budget(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
