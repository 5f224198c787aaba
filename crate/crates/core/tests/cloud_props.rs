//! Model check of the task state machine under randomized scheduling, plus
//! the accounting invariant.

use qtsp_core::cloud::{
    CloudRegistry, Money, Scenario, TaskPayload, TaskStatus,
};
use qtsp_core::graph::bundled_instance;
use qtsp_core::qubo::{default_penalty, encode_tsp_qubo};
use qtsp_core::{qpe, AnnealSchedule};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_gate_payload() -> TaskPayload {
    let m = bundled_instance();
    let enc = qpe::encode_phases(&m, 4).unwrap();
    let eig = qpe::enumerate_eigenstates(&m).unwrap().remove(0);
    let qc = qpe::build_qpe_circuit(&enc, &eig).unwrap();
    TaskPayload::Circuit { circuit: qc.circuit, measured: qc.measured }
}

fn small_qubo_payload() -> TaskPayload {
    let m = bundled_instance();
    let problem = encode_tsp_qubo(&m, default_penalty(&m)).unwrap();
    let mut schedule = AnnealSchedule::scaled_to(&problem, 0);
    schedule.sweeps = 32;
    TaskPayload::Qubo { problem, schedule }
}

fn allowed(from: TaskStatus, to: TaskStatus) -> bool {
    use TaskStatus::*;
    matches!(
        (from, to),
        (Created, Queued)
            | (Queued, Running)
            | (Running, Completed)
            | (Running, Failed)
            | (Created, Failed)
            | (Created, Cancelled)
            | (Queued, Cancelled)
            | (Running, Cancelled)
    )
}

#[test]
fn random_scheduling_never_leaves_the_allowed_edge_set() {
    let reg = CloudRegistry::new(Scenario::paper()).unwrap();
    let devices = [
        "local",
        "sv1",
        "tn1",
        "ionq",
        "riggeti_aspen8",
        "riggeti_aspen9",
        "dwave_dw2000",
        "dwave_advantage",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut ids = Vec::new();

    for step in 0..1000 {
        let device = devices[rng.random_range(0..devices.len())];
        let annealing = device.starts_with("dwave");
        let payload = if annealing { small_qubo_payload() } else { small_gate_payload() };
        let task = reg.submit(device, payload, 1 + step % 8).unwrap();
        ids.push(task.id);

        // interleave scheduler activity at random
        match rng.random_range(0..4u8) {
            0 => {
                reg.execute_pending();
            }
            1 => {
                let pick = &ids[rng.random_range(0..ids.len())];
                let _ = reg.poll(pick, rng.random_range(0..40) as f64).unwrap();
            }
            _ => {}
        }
    }
    // drain what is drainable, then cancel the stragglers via short polls
    for id in &ids {
        let _ = reg.poll(id, 10.0).unwrap();
    }

    let mut total_expected = Money::ZERO;
    for id in &ids {
        let task = reg.task(id).unwrap();
        assert!(task.status.is_terminal(), "task {id} left non-terminal");
        assert_eq!(task.history[0], TaskStatus::Created);
        for w in task.history.windows(2) {
            assert!(allowed(w[0], w[1]), "illegal edge {:?} -> {:?}", w[0], w[1]);
        }
        match task.status {
            TaskStatus::Completed => {
                let key = task.result_key.as_deref().expect("completed task has a result key");
                assert!(reg.fetch_result(key).is_some(), "result blob missing for {id}");
            }
            _ => assert!(task.result_key.is_none()),
        }
        // accounting: anything that reached RUNNING was charged, nothing else
        let ran = task.history.contains(&TaskStatus::Running);
        match reg.receipt(id) {
            Some(receipt) => {
                assert!(ran, "receipt for a task that never ran");
                let expected = reg.price(&task.device, task.shots).unwrap();
                assert_eq!(receipt, expected);
                total_expected = total_expected + expected.total;
            }
            None => assert!(!ran, "task {id} ran without a receipt"),
        }
    }
    let booked: Money = reg.receipts().values().map(|r| r.total).sum();
    assert_eq!(booked, total_expected);
}
