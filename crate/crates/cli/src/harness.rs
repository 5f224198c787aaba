//! Plan execution: sequential HTTP replay of every triple × repetition,
//! with outcomes treated as data and only transport failures aborting.

use std::net::SocketAddr;
use std::sync::Arc;

use anyhow::{bail, Context};
use reqwest::blocking::multipart::{Form, Part};
use reqwest::blocking::Client;

use qtsp_core::graph::{orders_equivalent, parse_matrix};
use qtsp_core::Money;
use qtsp_service::{AppState, ServiceConfig, TspResponse};

use crate::plan::ExperimentPlan;
use crate::report::{ExperimentRecord, LatencyStats, Outcome};

/// Starts the service on an ephemeral local port in a background thread
/// and returns its address once bound.
pub fn spawn_local_service(config: ServiceConfig) -> anyhow::Result<SocketAddr> {
    spawn_service(Arc::new(AppState::new(config)?))
}

/// Same, for callers that keep the state handle to inspect the registry.
pub fn spawn_service(state: Arc<AppState>) -> anyhow::Result<SocketAddr> {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .expect("tokio runtime");
        let bind: SocketAddr = ([127, 0, 0, 1], 0).into();
        runtime
            .block_on(qtsp_service::serve(bind, state, move |addr| {
                let _ = tx.send(addr);
            }))
            .expect("service stopped unexpectedly");
    });
    rx.recv().context("service did not report a bound address")
}

struct Exchange {
    response: Option<TspResponse>,
    error_code: Option<String>,
}

fn one_request(
    client: &Client,
    base_url: &str,
    endpoint: &str,
    device: &str,
    shots: Option<u64>,
    matrix_text: &str,
) -> anyhow::Result<Exchange> {
    let mut url = format!("{base_url}{endpoint}?device={device}");
    if let Some(s) = shots {
        url.push_str(&format!("&shots={s}"));
    }
    let form = Form::new().part(
        "matrix",
        Part::text(matrix_text.to_string()).file_name("matrix.txt"),
    );
    let response = client
        .post(&url)
        .multipart(form)
        .send()
        .with_context(|| format!("service unreachable at {base_url}"))?;
    if response.status().is_success() {
        let body: TspResponse = response.json().context("malformed success body")?;
        Ok(Exchange { response: Some(body), error_code: None })
    } else {
        let status = response.status();
        let code = response
            .json::<serde_json::Value>()
            .ok()
            .and_then(|v| v["code"].as_str().map(str::to_string))
            .unwrap_or_else(|| format!("http_{}", status.as_u16()));
        Ok(Exchange { response: None, error_code: Some(code) })
    }
}

/// Executes every triple × repetitions sequentially in plan order.
/// Error responses become error records; an unreachable service aborts.
pub fn run_plan(plan: &ExperimentPlan, base_url: &str) -> anyhow::Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    let matrix_text = std::fs::read_to_string(&plan.instance)
        .with_context(|| format!("cannot read instance {}", plan.instance.display()))?;
    let matrix = parse_matrix(&matrix_text).context("instance file is not a valid matrix")?;
    let base_url = base_url.trim_end_matches('/');
    let client = Client::new();

    let mut records = Vec::with_capacity(plan.triples.len());
    for triple in &plan.triples {
        // a shot-less triple submits once, only to capture the error
        let repetitions = if triple.shots.is_some() { plan.repetitions } else { 1 };
        let mut successes: Vec<TspResponse> = Vec::new();
        let mut last_error: Option<String> = None;
        for _ in 0..repetitions {
            let exchange = one_request(
                &client,
                base_url,
                triple.endpoint.path(),
                &triple.device,
                triple.shots,
                &matrix_text,
            )?;
            match exchange.response {
                Some(r) => successes.push(r),
                None => last_error = exchange.error_code,
            }
        }

        let consistent = if successes.len() >= 2 {
            Some(successes.windows(2).all(|w| {
                orders_equivalent(&w[0].route, &w[1].route, matrix.symmetric())
            }))
        } else {
            None
        };
        let latency =
            LatencyStats::from_samples(&successes.iter().map(|r| r.elapsed).collect::<Vec<_>>());
        let total_cost: Money = successes.iter().map(|r| r.cost_estimate).sum();
        let outcome = match successes.first() {
            Some(first) => {
                Outcome::Route { route: first.route.clone(), distance: first.distance }
            }
            None => Outcome::Error {
                code: last_error.unwrap_or_else(|| "no response".to_string()),
            },
        };
        records.push(ExperimentRecord {
            endpoint: triple.endpoint,
            device: triple.device.clone(),
            shots: triple.shots,
            repetitions,
            successes: successes.len() as u32,
            outcome,
            consistent,
            latency,
            total_cost,
        });
    }
    if records.len() != plan.triples.len() {
        bail!("record count diverged from plan triple count");
    }
    Ok(records)
}
