use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("truncation too small: captured weight {achieved:.6e} (deficit {deficit:.3e})")]
    Truncation { achieved: f64, deficit: f64 },

    #[error("integration accuracy: {0}")]
    Integration(String),

    #[error("positivity breach: minimum eigenvalue {0:.3e}")]
    Positivity(f64),

    #[error("degenerate drive: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
