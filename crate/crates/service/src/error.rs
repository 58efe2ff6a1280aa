use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::FromRequest;
use axum::extract::FromRequestParts;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use serde_json::Value;
use upsell_core::campaign::CampaignError;
use upsell_core::domain::DomainError;
use upsell_core::influence::InfluenceError;
use upsell_core::prompt::PromptError;
use upsell_core::recommend::RecommendError;

/// Error body shared by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub code: String,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub problem: Problem,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            problem: Problem {
                code: code.into(),
                message: message.into(),
                detail: Value::Null,
            },
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.problem.detail = detail;
        self
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "Malformed", message)
    }

    pub fn not_found(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(self.problem)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        Self::malformed(rejection.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(rejection: QueryRejection) -> Self {
        Self::malformed(rejection.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(rejection: PathRejection) -> Self {
        Self::malformed(rejection.body_text())
    }
}

impl From<DomainError> for ApiError {
    fn from(err: DomainError) -> Self {
        Self::malformed(err.to_string())
    }
}

impl From<CampaignError> for ApiError {
    fn from(err: CampaignError) -> Self {
        let message = err.to_string();
        match err {
            CampaignError::NotFound(_) => Self::not_found("NotFound", message),
            CampaignError::DuplicateName(_) => {
                Self::new(StatusCode::CONFLICT, "DuplicateName", message)
            }
            CampaignError::InvariantViolation(_) => {
                Self::new(StatusCode::CONFLICT, "InvariantViolation", message)
            }
            CampaignError::OrphanConversion { .. } => {
                Self::new(StatusCode::CONFLICT, "OrphanConversion", message)
            }
            CampaignError::Invalid(_) => Self::malformed(message),
            CampaignError::Io(_) | CampaignError::Corrupt(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", message)
            }
        }
    }
}

impl From<RecommendError> for ApiError {
    fn from(err: RecommendError) -> Self {
        let message = err.to_string();
        match err {
            RecommendError::EmptyCatalog => Self::not_found("EmptyCatalog", message),
            RecommendError::UnknownUser(_) => Self::not_found("UnknownReservation", message),
            RecommendError::UnknownItem(_) => Self::not_found("UnknownItem", message),
            RecommendError::StaleSnapshot { .. } => {
                Self::new(StatusCode::CONFLICT, "StaleSnapshot", message)
            }
            RecommendError::ColdStartNoRatings => {
                Self::new(StatusCode::CONFLICT, "ColdStartNoRatings", message)
            }
            RecommendError::NotAWine(_) | RecommendError::Domain(_) => Self::internal(message),
        }
    }
}

impl From<InfluenceError> for ApiError {
    fn from(err: InfluenceError) -> Self {
        let code = match err {
            InfluenceError::EmptySheet => "EmptySheet",
            InfluenceError::UnknownOption { .. } => "UnknownOption",
            _ => "Malformed",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, err.to_string())
    }
}

impl From<PromptError> for ApiError {
    fn from(err: PromptError) -> Self {
        let message = err.to_string();
        match err {
            PromptError::InvalidSpec(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidSpec", message)
            }
            PromptError::RateLimited => {
                Self::new(StatusCode::TOO_MANY_REQUESTS, "RateLimited", message)
            }
            PromptError::BackendUnavailable(_) => {
                Self::new(StatusCode::SERVICE_UNAVAILABLE, "BackendUnavailable", message)
            }
            PromptError::ParseFailure { raw } => {
                Self::new(StatusCode::BAD_GATEWAY, "ParseFailure", message)
                    .with_detail(Value::String(raw))
            }
        }
    }
}

/// `Json` whose rejections become 422 problem documents.
#[derive(Debug, FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct ApiJson<T>(pub T);

#[derive(Debug, FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
pub struct ApiQuery<T>(pub T);

#[derive(Debug, FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ApiError))]
pub struct ApiPath<T>(pub T);
