use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant maps onto one of the CLI exit classes: capacity and budget
/// errors are resource errors, certificate and setting errors are input
/// violations, the rest are usage errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic capacity exceeded: {0}")]
    Overflow(&'static str),

    #[error("enumeration budget exceeded: {needed} states requested, limit is {limit}")]
    Budget { needed: u128, limit: u128 },

    #[error("size guard violated: {0}")]
    SizeGuard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("certificate rejected: {0}")]
    Certificate(String),

    #[error("setting violated: {0}")]
    Setting(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_) | Error::Budget { .. } | Error::SizeGuard(_)
        )
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Error::Certificate(_) | Error::Setting(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
