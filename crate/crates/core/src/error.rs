use thiserror::Error;

use crate::model::Direction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be a finite nonnegative number, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("probability out of range: {name} = {value} is not in [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("frozen {0} direction reachable: both speed and jump rate are zero")]
    FrozenDirection(Direction),

    #[error("invalid jump law: {0}")]
    InvalidJumpLaw(String),

    #[error("start position {position} incompatible with direction {direction}")]
    IncompatibleStart { position: f64, direction: Direction },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parameters outside the supported special case: {0}")]
    NotSpecialCase(String),

    #[error("no stationary state: the reset rate is zero")]
    NoStationaryState,

    #[error("{censored} of {n} first-passage runs hit the censoring cap")]
    Censored { censored: u64, n: u64 },

    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
