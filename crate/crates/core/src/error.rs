use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("coordinate {index}: value {value} is not in its domain")]
    Domain { index: usize, value: f64 },

    #[error("coordinate {0} has fewer than two admissible values")]
    DegenerateDomain(usize),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("kernel misuse: {0}")]
    KernelMisuse(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad user input rather than by the computation itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse(_)
                | Error::Dimension { .. }
                | Error::Domain { .. }
                | Error::DegenerateDomain(_)
                | Error::Capability(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
