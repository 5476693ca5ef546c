use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value breaks a construction rule.
    #[error("configuration error: {0}")]
    Config(String),
    /// Inputs handed to an operation do not satisfy its preconditions.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Bit or symbol sequences do not fit the frame layout.
    #[error("framing error: {0}")]
    Framing(String),
    /// Pilot or channel matrix is too ill-conditioned to invert.
    #[error("detection error: {message} (condition number {condition_number:.3e})")]
    Detection {
        message: String,
        condition_number: f64,
    },
}
