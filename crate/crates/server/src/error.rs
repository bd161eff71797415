use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use scholarscope::analytics::AnalyticsError;
use scholarscope::corpus::CorpusError;
use scholarscope::index::SearchError;
use scholarscope::topics::TopicError;
use serde::Serialize;

use crate::state::IngestFailed;
use crate::VERSION_HEADER;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub error_code: String,
    pub message: String,
}

/// A request failure, rendered as `{error_code, message}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    /// Version of the snapshot the request ran against, when it got that far.
    pub version: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            version: None,
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn at_version(mut self, version: u64) -> Self {
        self.version = Some(version);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error_code: self.code.to_string(),
            message: self.message,
        };
        let mut resp = (self.status, Json(body)).into_response();
        if let Some(v) = self.version {
            resp.headers_mut().insert(VERSION_HEADER, v.into());
        }
        resp
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        let code = match e {
            SearchError::EmptyQuery => "EmptyQuery",
            SearchError::BadPage => "BadPage",
            SearchError::UnknownDomain(_) => "UnknownDomain",
            SearchError::PhraseTooLong(_) => "PhraseTooLong",
            SearchError::EmptyPhrase => "EmptyPhrase",
            SearchError::BadYearRange { .. } => "BadYearRange",
        };
        ApiError::bad_request(code, e.to_string())
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        let code = match e {
            AnalyticsError::UnknownPaper(_) => "UnknownPaper",
            AnalyticsError::UnknownAuthor(_) => "UnknownAuthor",
            AnalyticsError::UnknownVenue(_) => "UnknownVenue",
            AnalyticsError::UnknownListKind(_) => "UnknownListKind",
        };
        ApiError::not_found(code, e.to_string())
    }
}

impl From<CorpusError> for ApiError {
    fn from(e: CorpusError) -> Self {
        ApiError::bad_request("MalformedId", e.to_string())
    }
}

impl From<TopicError> for ApiError {
    fn from(e: TopicError) -> Self {
        match e {
            TopicError::UnknownSubtopic { .. } => ApiError::not_found("UnknownSubtopic", e.to_string()),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", other.to_string()),
        }
    }
}

impl From<IngestFailed> for ApiError {
    fn from(e: IngestFailed) -> Self {
        let version = e.retained_version;
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IngestFailed", e.to_string()).at_version(version)
    }
}
