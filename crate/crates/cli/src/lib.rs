//! Batch evaluation harness: replays an experiment plan against the
//! service, records outcomes, timing and cost per (endpoint, device, shots)
//! triple, and renders the report tables.

pub mod harness;
pub mod plan;
pub mod report;

pub use harness::{run_plan, spawn_local_service, spawn_service};
pub use plan::{EndpointKind, ExperimentPlan, PlanTriple};
pub use report::{render_report, ExperimentRecord, LatencyStats, Outcome, Report};
