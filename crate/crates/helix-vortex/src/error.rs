use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at a point where the quantity is singular.
    #[error("singular input: {0}")]
    Singular(String),

    /// A sampled field returned a non-finite value.
    #[error("field evaluation failed: {0}")]
    Evaluation(String),

    /// Total circulation is not 1 where unit mass is required.
    #[error("field mass {mass} is not 1 within 1e-9")]
    Normalization { mass: f64 },

    /// Too few data points for a fit.
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Configuration file or override could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// A particle position diverged (non-finite, or a step-sized teleport)
    /// during time integration.
    #[error("numerical blowup at step {step}: particle positions diverged")]
    Blowup { step: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code under the harness contract: 2 for configuration
    /// problems, 3 for numerical blowup, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Blowup { .. } => 3,
            _ => 1,
        }
    }
}
