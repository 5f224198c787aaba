//! The two solver endpoints plus task and device observability.

use std::sync::Arc;

use axum::extract::{Multipart, Path, Query, State};
use axum::Json;
use serde::Deserialize;

use qtsp_core::cloud::{
    CloudRegistry, Paradigm, QuantumTask, ResultData, TaskPayload, TaskStatus,
    REASON_DEVICE_UNAVAILABLE, REASON_INSUFFICIENT_QUBITS,
};
use qtsp_core::graph::{parse_matrix, tour_cost, CostMatrix, Tour};
use qtsp_core::qpe::{self, QpeError};
use qtsp_core::qubo::{decode_tour, default_penalty, encode_tsp_qubo};
use qtsp_core::{AnnealSchedule, Money};

use crate::error::ServiceError;
use crate::{AppState, TspResponse};

#[derive(Debug, Deserialize)]
pub struct SolveQuery {
    device: Option<String>,
    shots: Option<u64>,
    phase_bits: Option<usize>,
}

/// Reads the uploaded `matrix` field and parses it.
async fn matrix_from_multipart(mut body: Multipart) -> Result<CostMatrix, ServiceError> {
    while let Some(field) = body
        .next_field()
        .await
        .map_err(|e| ServiceError::bad_matrix(format!("cannot read multipart body: {e}")))?
    {
        if field.name() == Some("matrix") {
            let text = field
                .text()
                .await
                .map_err(|e| ServiceError::bad_matrix(format!("cannot read matrix field: {e}")))?;
            return parse_matrix(&text).map_err(|e| ServiceError::bad_matrix(e.to_string()));
        }
    }
    Err(ServiceError::bad_matrix("multipart body has no `matrix` field"))
}

/// Resolves the device query parameter against the catalog and the
/// endpoint's paradigm; wrong-paradigm devices read as unknown.
fn resolve_device(
    registry: &CloudRegistry,
    query: &SolveQuery,
    wants_annealing: bool,
) -> Result<String, ServiceError> {
    let name = query
        .device
        .as_deref()
        .ok_or_else(|| ServiceError::unknown_device("missing `device` query parameter"))?;
    let profile = registry
        .device(name)
        .map_err(|_| ServiceError::unknown_device(format!("unknown device {name:?}")))?;
    let matches = if wants_annealing {
        profile.paradigm == Paradigm::Annealing
    } else {
        profile.paradigm.executes_circuits()
    };
    if !matches {
        return Err(ServiceError::unknown_device(format!(
            "device {name:?} does not serve this endpoint"
        )));
    }
    Ok(profile.name)
}

/// Maps a task that failed at submission to the endpoint error.
fn submission_failure(task: &QuantumTask) -> Option<ServiceError> {
    if task.status != TaskStatus::Failed {
        return None;
    }
    Some(match task.failure_reason.as_deref() {
        Some(REASON_INSUFFICIENT_QUBITS) => ServiceError::insufficient_qubits(format!(
            "task {} rejected: insufficient qubits on {}",
            task.id, task.device
        )),
        Some(REASON_DEVICE_UNAVAILABLE) => ServiceError::device_unavailable(format!(
            "device {} is unavailable",
            task.device
        )),
        other => ServiceError::internal(format!(
            "task {} failed at submission: {}",
            task.id,
            other.unwrap_or("unknown reason")
        )),
    })
}

fn wait_for(
    registry: &CloudRegistry,
    task_id: &str,
    timeout_secs: f64,
) -> Result<QuantumTask, ServiceError> {
    let task = registry
        .poll(task_id, timeout_secs)
        .map_err(|e| ServiceError::internal(e.to_string()))?;
    match task.status {
        TaskStatus::Completed => Ok(task),
        TaskStatus::Cancelled => Err(ServiceError::poll_timeout(format!(
            "task {} still {:?} after {timeout_secs} virtual seconds",
            task.id,
            task.history[task.history.len() - 2]
        ))),
        _ => Err(ServiceError::internal(format!(
            "task {} ended {:?}: {}",
            task.id,
            task.status,
            task.failure_reason.as_deref().unwrap_or("unknown reason")
        ))),
    }
}

fn total_cost(registry: &CloudRegistry, task_ids: &[String]) -> Money {
    task_ids
        .iter()
        .filter_map(|id| registry.receipt(id))
        .map(|r| r.total)
        .sum()
}

pub async fn solve_adiabatic(
    State(state): State<Arc<AppState>>,
    Query(query): Query<SolveQuery>,
    body: Multipart,
) -> Result<Json<TspResponse>, ServiceError> {
    let matrix = matrix_from_multipart(body).await?;
    let shots = query.shots.unwrap_or(state.config.default_shots);
    let device = resolve_device(&state.registry, &query, true)?;
    let task = tokio::task::spawn_blocking(move || {
        adiabatic_blocking(&state, &device, matrix, shots)
    })
    .await
    .map_err(|e| ServiceError::internal(format!("worker panicked: {e}")))??;
    Ok(Json(task))
}

fn adiabatic_blocking(
    state: &AppState,
    device: &str,
    matrix: CostMatrix,
    shots: u64,
) -> Result<TspResponse, ServiceError> {
    let registry = &state.registry;
    let started_ms = registry.now_virtual_ms();

    let problem = encode_tsp_qubo(&matrix, default_penalty(&matrix))
        .map_err(|e| ServiceError::internal(e.to_string()))?;
    let schedule = AnnealSchedule::scaled_to(&problem, 0);
    let payload = TaskPayload::Qubo { problem, schedule };

    let task = registry
        .submit(device, payload, shots)
        .map_err(|e| ServiceError::internal(e.to_string()))?;
    if let Some(err) = submission_failure(&task) {
        return Err(err);
    }
    let done = wait_for(registry, &task.id, state.config.poll_timeout_secs)?;

    let key = done.result_key.as_deref().expect("completed task has a result key");
    let doc = registry
        .result_document(key)
        .ok_or_else(|| ServiceError::internal("result document missing from store"))?;
    let ResultData::Samples { samples } = doc.data else {
        return Err(ServiceError::internal("annealing task produced a gate result"));
    };
    // samples arrive sorted by energy; take the first feasible one
    let tour = samples
        .iter()
        .find_map(|s| decode_tour(&matrix, &s.assignment_bits()).ok().flatten())
        .ok_or_else(|| ServiceError::internal("no feasible sample among the returned reads"))?;
    let distance = tour_cost(&matrix, &tour).map_err(|e| ServiceError::internal(e.to_string()))?;

    Ok(TspResponse {
        route: tour.order().to_vec(),
        distance: Some(distance),
        task_ids: vec![done.id.clone()],
        device: device.to_string(),
        shots,
        cost_estimate: total_cost(registry, &[done.id]),
        elapsed: (registry.now_virtual_ms() - started_ms) as f64 / 1000.0,
    })
}

pub async fn solve_gate(
    State(state): State<Arc<AppState>>,
    Query(query): Query<SolveQuery>,
    body: Multipart,
) -> Result<Json<TspResponse>, ServiceError> {
    let matrix = matrix_from_multipart(body).await?;
    let shots = query.shots.unwrap_or(state.config.default_shots);
    let phase_bits = query.phase_bits.unwrap_or(state.config.default_phase_bits);
    let device = resolve_device(&state.registry, &query, false)?;
    let response = tokio::task::spawn_blocking(move || {
        gate_blocking(&state, &device, matrix, shots, phase_bits)
    })
    .await
    .map_err(|e| ServiceError::internal(format!("worker panicked: {e}")))??;
    Ok(Json(response))
}

fn map_qpe_error(e: QpeError) -> ServiceError {
    match e {
        QpeError::DegenerateInstance | QpeError::NoPhaseBits => {
            ServiceError::bad_matrix(e.to_string())
        }
        QpeError::TooManyCities { .. } | QpeError::QubitBudget { .. } => {
            ServiceError::insufficient_qubits(e.to_string())
        }
        other => ServiceError::internal(other.to_string()),
    }
}

fn gate_blocking(
    state: &AppState,
    device: &str,
    matrix: CostMatrix,
    shots: u64,
    phase_bits: usize,
) -> Result<TspResponse, ServiceError> {
    let registry = &state.registry;
    let started_ms = registry.now_virtual_ms();

    let encoding = qpe::encode_phases(&matrix, phase_bits).map_err(map_qpe_error)?;
    let eigenstates = qpe::enumerate_eigenstates(&matrix).map_err(map_qpe_error)?;

    // one circuit and one task per eigenstate; abort on the first
    // submission-time rejection without submitting the rest
    let mut submitted = Vec::with_capacity(eigenstates.len());
    for eig in &eigenstates {
        let circuit = qpe::build_qpe_circuit(&encoding, eig).map_err(map_qpe_error)?;
        let payload = TaskPayload::Circuit { circuit: circuit.circuit, measured: circuit.measured };
        let task = registry
            .submit(device, payload, shots)
            .map_err(|e| ServiceError::internal(e.to_string()))?;
        if let Some(err) = submission_failure(&task) {
            return Err(err);
        }
        submitted.push(task);
    }

    let mut estimates = Vec::with_capacity(submitted.len());
    let mut task_ids = Vec::with_capacity(submitted.len());
    for (task, eig) in submitted.iter().zip(eigenstates) {
        let done = wait_for(registry, &task.id, state.config.poll_timeout_secs)?;
        let key = done.result_key.as_deref().expect("completed task has a result key");
        let doc = registry
            .result_document(key)
            .ok_or_else(|| ServiceError::internal("result document missing from store"))?;
        let ResultData::Counts { counts } = doc.data else {
            return Err(ServiceError::internal("gate task produced an annealing result"));
        };
        let counts = qtsp_core::ShotResult { counts, shots: doc.shots };
        estimates.push(qpe::phase_estimate_from_counts(&encoding, eig, counts));
        task_ids.push(done.id.clone());
    }

    let (winner, _tie) =
        qpe::select_minimum_mode(&matrix, &estimates).map_err(map_qpe_error)?;
    let route: Tour = estimates[winner].eigenstate.tour.clone();

    Ok(TspResponse {
        route: route.order().to_vec(),
        distance: None,
        task_ids: task_ids.clone(),
        device: device.to_string(),
        shots,
        cost_estimate: total_cost(registry, &task_ids),
        elapsed: (registry.now_virtual_ms() - started_ms) as f64 / 1000.0,
    })
}

pub async fn task_status(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<QuantumTask>, ServiceError> {
    state
        .registry
        .task(&id)
        .map(Json)
        .map_err(|_| ServiceError::not_found(format!("unknown task {id:?}")))
}

pub async fn device_catalog(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "devices": state.registry.devices() }))
}
