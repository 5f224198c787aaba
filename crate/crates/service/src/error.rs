//! Error envelope returned by every endpoint.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadMatrix,
    UnknownDevice,
    DeviceUnavailable,
    InsufficientQubits,
    PollTimeout,
    Internal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceError {
    pub http_status: u16,
    pub code: ErrorCode,
    pub message: String,
}

impl ServiceError {
    fn new(http_status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        Self { http_status: http_status.as_u16(), code, message: message.into() }
    }

    pub fn bad_matrix(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, ErrorCode::BadMatrix, message)
    }

    pub fn unknown_device(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, ErrorCode::UnknownDevice, message)
    }

    pub fn device_unavailable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, ErrorCode::DeviceUnavailable, message)
    }

    pub fn insufficient_qubits(message: impl Into<String>) -> Self {
        Self::new(StatusCode::PAYLOAD_TOO_LARGE, ErrorCode::InsufficientQubits, message)
    }

    pub fn poll_timeout(message: impl Into<String>) -> Self {
        Self::new(StatusCode::GATEWAY_TIMEOUT, ErrorCode::PollTimeout, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, message)
    }

    /// 404 for a missing resource that is not a device lookup.
    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, ErrorCode::Internal, message)
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}
