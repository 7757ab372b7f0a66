use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use eyevis_core::Error;
use serde::Serialize;

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<&'static str>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            stage: None,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid-argument", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            Error::InvalidArgument(_) => (StatusCode::BAD_REQUEST, "invalid-argument"),
            Error::InvalidImage(_) => (StatusCode::BAD_REQUEST, "invalid-image"),
            Error::DetectionFailure { .. } | Error::DegenerateGeometry(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "detection-failure")
            }
            Error::MissingAnnotation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "missing-annotation"),
            Error::MissingBaseline(_) => (StatusCode::CONFLICT, "missing-baseline"),
            Error::NoOpenSession(_) => (StatusCode::CONFLICT, "no-open-session"),
            Error::SessionAlreadyOpen(_) => (StatusCode::CONFLICT, "session-already-open"),
            Error::NotFound(_) => (StatusCode::NOT_FOUND, "not-found"),
            Error::Io(_) | Error::Format(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        let stage = match &e {
            Error::DetectionFailure { stage, .. } => stage.map(|s| s.as_str()),
            _ => None,
        };
        if status.is_server_error() {
            tracing::error!("{message}");
        }
        Self {
            status,
            code,
            message,
            stage,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
