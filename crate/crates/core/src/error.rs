use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `|1 + z|` fell below the singular tolerance.
    #[error("map is singular: |1 + z| = {distance:e} below tolerance")]
    Singular { distance: f64 },

    #[error("orbit hit the pole at step {step}")]
    SingularOrbit { step: usize },

    #[error("orbit escaped at step {step}")]
    EscapedOrbit { step: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("usage: {0}")]
    Usage(String),

    #[error("format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code for this failure: 2 for caller mistakes, 3 for
    /// numeric failures of the dynamics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singular { .. } | Error::SingularOrbit { .. } | Error::EscapedOrbit { .. } => 3,
            _ => 2,
        }
    }
}
