use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Derivatives of q are only available up to order 4.
    #[error("unsupported derivative order {0} (maximum is 4)")]
    UnsupportedOrder(u8),
    /// The potential violates subharmonicity or the growth condition.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("root finding failed: {0}")]
    Solver(String),
    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
