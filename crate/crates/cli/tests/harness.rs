//! Harness behavior against a self-hosted service: record shapes,
//! determinism of the machine-readable report, and the bundled files.

use std::path::{Path, PathBuf};

use qtsp_cli::{render_report, run_plan, spawn_local_service, ExperimentPlan, Outcome};
use qtsp_core::cloud::{Scenario, ScenarioOverrides};
use qtsp_core::graph::orders_equivalent;
use qtsp_service::ServiceConfig;

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn small_plan() -> ExperimentPlan {
    ExperimentPlan::from_json(&format!(
        r#"{{
            "instance": {:?},
            "repetitions": 3,
            "seed": 5,
            "triples": [
                {{"endpoint": "adiabatic", "device": "dwave_dw2000", "shots": 300}},
                {{"endpoint": "gate", "device": "local", "shots": 1000}},
                {{"endpoint": "gate", "device": "tn1"}}
            ]
        }}"#,
        repo_path("instances/mstar.txt").display().to_string()
    ))
    .unwrap()
}

fn service_url(seed: u64) -> String {
    let mut config = ServiceConfig::default();
    config.scenario.seed = seed;
    let addr = spawn_local_service(config).unwrap();
    format!("http://{addr}")
}

#[test]
fn records_mirror_plan_triples() {
    let plan = small_plan();
    let records = run_plan(&plan, &service_url(plan.seed)).unwrap();
    assert_eq!(records.len(), plan.triples.len());

    let dwave = &records[0];
    assert_eq!(dwave.successes, 3);
    assert_eq!(dwave.consistent, Some(true));
    match &dwave.outcome {
        Outcome::Route { route, distance } => {
            assert!(orders_equivalent(route, &[0, 2, 1, 3], true));
            assert_eq!(*distance, Some(10.0));
        }
        Outcome::Error { code } => panic!("unexpected error {code}"),
    }
    let lat = dwave.latency.as_ref().unwrap();
    assert!(lat.min <= lat.mean && lat.mean <= lat.max && lat.min >= 0.0);
    assert_eq!(lat.min, 21.0);

    let local = &records[1];
    assert_eq!(local.consistent, Some(true));
    match &local.outcome {
        Outcome::Route { route, distance } => {
            assert!(orders_equivalent(route, &[0, 2, 1, 3], true));
            assert_eq!(*distance, None);
        }
        Outcome::Error { code } => panic!("unexpected error {code}"),
    }

    let tn1 = &records[2];
    assert_eq!(tn1.repetitions, 1, "shot-less triples submit once");
    assert_eq!(tn1.successes, 0);
    assert_eq!(tn1.consistent, None);
    assert!(tn1.latency.is_none());
    assert_eq!(tn1.outcome, Outcome::Error { code: "device_unavailable".to_string() });
}

#[test]
fn same_plan_and_seed_give_identical_reports() {
    let plan = small_plan();
    let a = render_report(&run_plan(&plan, &service_url(plan.seed)).unwrap(), 4, 6);
    let b = render_report(&run_plan(&plan, &service_url(plan.seed)).unwrap(), 4, 6);
    assert_eq!(a.results_csv, b.results_csv);
    assert_eq!(a.latency_csv, b.latency_csv);
    assert_eq!(a.costs_csv, b.costs_csv);
}

#[test]
fn empty_plan_renders_header_only_tables() {
    let mut plan = small_plan();
    plan.triples.clear();
    let records = run_plan(&plan, &service_url(1)).unwrap();
    assert!(records.is_empty());
    let report = render_report(&records, 4, 6);
    assert_eq!(report.results_csv.lines().count(), 1);
}

#[test]
fn unreachable_service_aborts_with_transport_error() {
    let plan = small_plan();
    assert!(run_plan(&plan, "http://127.0.0.1:9").is_err());
}

#[test]
fn bundled_scenario_file_matches_defaults() {
    let text = std::fs::read_to_string(repo_path("scenarios/paper.json")).unwrap();
    let scenario = ScenarioOverrides::from_json(&text).unwrap().resolve().unwrap();
    assert_eq!(scenario, Scenario::paper());
}

#[test]
fn bundled_plan_file_loads() {
    let plan = ExperimentPlan::load(&repo_path("plans/paper.json")).unwrap();
    assert_eq!(plan.triples.len(), 15);
    assert!(plan.instance.ends_with("instances/mstar.txt"));
    assert!(plan.instance.exists());
}
