use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PamError {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested feature or family is not supported by this routine.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The model violates a structural condition (Dalang, Hölder, ...).
    #[error("model error: {0}")]
    Model(String),
    /// A numerical procedure failed to reach the requested tolerance.
    #[error("numerical non-convergence: {message} (achieved {achieved:.3e})")]
    NonConvergence { message: String, achieved: f64 },
    /// The configuration could not be parsed or is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PamError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(PamError::Domain(msg.into()))
}
