use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] mlogs_core::Error),
    #[error("{file}: {source}")]
    InFile {
        file: String,
        #[source]
        source: mlogs_core::Error,
    },
    #[error("unknown project {0}")]
    UnknownProject(String),
    #[error("unknown well {0}")]
    UnknownWell(String),
    #[error("well name {0} matches more than one well; use the well id")]
    AmbiguousWell(String),
    #[error("unknown selection {0}")]
    UnknownSelection(String),
    #[error("unknown model {0}")]
    UnknownModel(String),
    #[error("nothing to undo for well {0}")]
    NothingToUndo(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("upload exceeds the {cap} byte limit")]
    PayloadTooLarge { cap: usize },
    #[error("storage error at {path}: {message}")]
    Storage { path: String, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Wire form of every error response.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub location: Option<String>,
}

impl ServiceError {
    pub fn storage(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        ServiceError::Storage {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Core(e) | ServiceError::InFile { source: e, .. } => e.code(),
            ServiceError::UnknownProject(_) => "unknown_project",
            ServiceError::UnknownWell(_) => "unknown_well",
            ServiceError::AmbiguousWell(_) => "ambiguous_well",
            ServiceError::UnknownSelection(_) => "unknown_selection",
            ServiceError::UnknownModel(_) => "unknown_model",
            ServiceError::NothingToUndo(_) => "nothing_to_undo",
            ServiceError::Validation(_) => "validation",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::PayloadTooLarge { .. } => "payload_too_large",
            ServiceError::Storage { .. } => "storage",
            ServiceError::Config(_) => "config",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn location(&self) -> Option<String> {
        match self {
            ServiceError::Core(e) => e.location(),
            ServiceError::InFile { file, source } => Some(match source.location() {
                Some(loc) => format!("{file}: {loc}"),
                None => file.clone(),
            }),
            ServiceError::UnknownProject(id)
            | ServiceError::UnknownWell(id)
            | ServiceError::AmbiguousWell(id)
            | ServiceError::UnknownSelection(id)
            | ServiceError::UnknownModel(id)
            | ServiceError::NothingToUndo(id) => Some(id.clone()),
            ServiceError::Storage { path, .. } => Some(path.clone()),
            _ => None,
        }
    }

    pub fn status(&self) -> StatusCode {
        use mlogs_core::Error as E;
        match self {
            ServiceError::UnknownProject(_)
            | ServiceError::UnknownWell(_)
            | ServiceError::UnknownSelection(_)
            | ServiceError::UnknownModel(_)
            | ServiceError::Core(E::UnknownCurve(_) | E::UnknownColumn(_)) => StatusCode::NOT_FOUND,
            ServiceError::NothingToUndo(_) => StatusCode::CONFLICT,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::PayloadTooLarge { .. } => StatusCode::PAYLOAD_TOO_LARGE,
            ServiceError::Storage { .. } | ServiceError::Config(_) | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().to_string(),
            message: self.to_string(),
            location: self.location(),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (self.status(), Json(self.body())).into_response()
    }
}

impl From<JsonRejection> for ServiceError {
    fn from(r: JsonRejection) -> Self {
        ServiceError::BadRequest(r.body_text())
    }
}

impl From<QueryRejection> for ServiceError {
    fn from(r: QueryRejection) -> Self {
        ServiceError::BadRequest(r.body_text())
    }
}

impl From<PathRejection> for ServiceError {
    fn from(r: PathRejection) -> Self {
        ServiceError::BadRequest(r.body_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_keep_line_and_file() {
        let err = ServiceError::InFile {
            file: "a.las".into(),
            source: mlogs_core::Error::BadValue {
                line: 12,
                token: "x".into(),
            },
        };
        assert_eq!(err.status(), StatusCode::UNPROCESSABLE_ENTITY);
        let body = err.body();
        assert_eq!(body.code, "bad_value");
        assert_eq!(body.location.as_deref(), Some("a.las: line 12"));
    }

    #[test]
    fn statuses() {
        assert_eq!(ServiceError::UnknownWell("w".into()).status(), StatusCode::NOT_FOUND);
        assert_eq!(
            ServiceError::Core(mlogs_core::Error::UnknownCurve("GR".into())).status(),
            StatusCode::NOT_FOUND
        );
        assert_eq!(ServiceError::PayloadTooLarge { cap: 1 }.status(), StatusCode::PAYLOAD_TOO_LARGE);
    }
}
