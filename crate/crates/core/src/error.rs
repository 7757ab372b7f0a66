use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage at which a landmark detection failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    FirstPass,
    SecondPass,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::FirstPass => "first-pass",
            Stage::SecondPass => "second-pass",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("face landmark detection failed{}: {message}", .stage.map(|s| format!(" ({s})")).unwrap_or_default())]
    DetectionFailure {
        stage: Option<Stage>,
        message: String,
    },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("missing baseline: {0}")]
    MissingBaseline(String),

    #[error("no open session for user {0}")]
    NoOpenSession(String),

    #[error("user {0} already has an open session")]
    SessionAlreadyOpen(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("missing annotation: {0}")]
    MissingAnnotation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn detection(msg: impl Into<String>) -> Self {
        Error::DetectionFailure {
            stage: None,
            message: msg.into(),
        }
    }

    /// Tags a detection failure with the pipeline stage it came from.
    /// Other errors pass through untouched.
    pub fn at_stage(self, stage: Stage) -> Self {
        match self {
            Error::DetectionFailure { message, .. } => Error::DetectionFailure {
                stage: Some(stage),
                message,
            },
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
