use thiserror::Error;

use crate::geometry::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A size, bound or intermediate value does not fit the machine-word arithmetic
    /// or the capacity of an [`NttPlan`](crate::ntt::NttPlan).
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid polygon: {0}")]
    Polygon(#[from] Violation),
    /// The polygon is valid but not of the shape the operation requires.
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
