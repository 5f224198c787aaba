//! HTTP layer: two synchronous TSP endpoints that route to the virtual
//! quantum cloud by a `device` query parameter, plus task and device
//! observability. Handlers wait internally for task completion; callers
//! get a finished answer or a structured error.

mod error;
mod handlers;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};

use qtsp_core::cloud::{CloudRegistry, Scenario};
use qtsp_core::Money;

pub use error::{ErrorCode, ServiceError};

/// Answer of a successful solve. `distance` is present only on the
/// adiabatic path; the gate path does not report costs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TspResponse {
    pub route: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    pub task_ids: Vec<String>,
    pub device: String,
    pub shots: u64,
    pub cost_estimate: Money,
    /// Virtual seconds spent inside the request, queueing included.
    pub elapsed: f64,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub scenario: Scenario,
    /// Virtual seconds a handler waits on a task before giving up with 504.
    pub poll_timeout_secs: f64,
    pub default_shots: u64,
    pub default_phase_bits: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::paper(),
            poll_timeout_secs: 300.0,
            default_shots: 1000,
            default_phase_bits: 6,
        }
    }
}

pub struct AppState {
    pub registry: CloudRegistry,
    pub config: ServiceConfig,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Result<Self, qtsp_core::cloud::scenario::ScenarioError> {
        let registry = CloudRegistry::new(config.scenario.clone())?;
        Ok(Self { registry, config })
    }
}

pub fn build_router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/tsp/adiabatic", post(handlers::solve_adiabatic))
        .route("/tsp/gate", post(handlers::solve_gate))
        .route("/tasks/{id}", get(handlers::task_status))
        .route("/devices", get(handlers::device_catalog))
        .with_state(state)
}

/// Binds and serves until the process ends. Returns the bound address
/// through the callback before blocking, so callers can use port 0.
pub async fn serve(
    addr: SocketAddr,
    state: Arc<AppState>,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, build_router(state)).await
}
