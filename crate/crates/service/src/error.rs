use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// JSON error body: `{"error": "<code>", "detail": "<message>"}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub detail: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    detail: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> ApiError {
        ApiError { status, code, detail: detail.into() }
    }

    pub fn malformed(detail: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "malformed_payload", detail)
    }

    pub fn unprocessable(code: &'static str, detail: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, detail)
    }

    pub fn not_found(detail: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", detail)
    }

    pub fn internal(detail: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(Body { error: self.code, detail: &self.detail })).into_response()
    }
}

impl From<faceparse_core::landmarks::LandmarkError> for ApiError {
    fn from(e: faceparse_core::landmarks::LandmarkError) -> ApiError {
        use faceparse_core::landmarks::LandmarkError::*;
        let code = match e {
            CountMismatch { .. } => "count_mismatch",
            InvalidCoordinate { .. } => "invalid_coordinate",
            VisibilityMismatch { .. } => "visibility_mismatch",
            MalformedLine { .. } => "malformed_landmarks",
        };
        ApiError::unprocessable(code, e.to_string())
    }
}

impl From<faceparse_core::pipeline::AnnotateError> for ApiError {
    fn from(e: faceparse_core::pipeline::AnnotateError) -> ApiError {
        ApiError::unprocessable("fit_failed", e.to_string())
    }
}

/// Parses a JSON body: syntax and type errors are 400.
pub fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::malformed(e.to_string()))
}
