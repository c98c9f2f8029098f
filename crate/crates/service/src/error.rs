use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use defii_core::mapping::MappingError;
use defii_core::specified_model::SpecError;
use defii_core::EngineError;
use serde::{Deserialize, Serialize};

/// The body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status: status.as_u16(), code: code.to_string(), message: message.into() }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        use StatusCode as S;
        let message = err.to_string();
        let (status, code) = match &err {
            EngineError::Query(d) => {
                return ApiError::bad_request(
                    "parse-error",
                    format!("line {}, column {}: {}", d.line, d.column, d.message),
                )
            }
            EngineError::Eval(_) => (S::BAD_REQUEST, "eval-error"),
            EngineError::Spec(SpecError::UnknownModel(_))
            | EngineError::Mapping(MappingError::UnknownModel(_))
            | EngineError::Spec(SpecError::Mapping(MappingError::UnknownModel(_))) => (S::NOT_FOUND, "unknown-model"),
            EngineError::Spec(SpecError::UnknownIndividual(_)) => (S::NOT_FOUND, "unknown-individual"),
            EngineError::Spec(SpecError::UnknownPort(_)) => (S::BAD_REQUEST, "unknown-port"),
            EngineError::Spec(SpecError::ReadOnlyPort(_)) => (S::BAD_REQUEST, "read-only-port"),
            EngineError::Spec(SpecError::TypeMismatch { .. }) => (S::BAD_REQUEST, "type-mismatch"),
            EngineError::Spec(SpecError::Unresolvable { .. } | SpecError::MissingValue { .. }) => {
                (S::UNPROCESSABLE_ENTITY, "unresolvable-binding")
            }
            EngineError::Spec(SpecError::DuplicateModel(_)) => (S::CONFLICT, "duplicate-model"),
            EngineError::Spec(SpecError::Json(_) | SpecError::Invalid(_) | SpecError::InvalidPort { .. }) => {
                (S::BAD_REQUEST, "invalid-misd")
            }
            EngineError::Mapping(MappingError::Json(_) | MappingError::Invalid(_)) => (S::BAD_REQUEST, "invalid-document"),
            e if e.is_validation() => (S::BAD_REQUEST, "invalid-request"),
            _ => (S::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, message)
    }
}
