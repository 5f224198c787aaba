//! Virtual quantum cloud: a device registry with queueing, availability,
//! capacity and pricing, a task lifecycle with a write-once object store,
//! and a deterministic virtual clock so latency behavior is testable in
//! milliseconds.

pub mod money;
pub mod scenario;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Mutex;
use std::time::Duration;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anneal::{anneal, AnnealSchedule, BinarySample};
use crate::qubo::QuboProblem;
use crate::seeding::derive_seed;
use crate::statevector::{self, Circuit};

pub use money::Money;
pub use scenario::{Capacity, DeviceProfile, Paradigm, QueueDelay, Scenario, ScenarioOverrides};

pub const REASON_INSUFFICIENT_QUBITS: &str = "insufficient qubits";
pub const REASON_DEVICE_UNAVAILABLE: &str = "device unavailable";

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("unknown device {0:?}")]
    UnknownDevice(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("device {device:?} cannot execute this payload kind")]
    PayloadMismatch { device: String },
    #[error("object store already holds key {0:?}")]
    DuplicateKey(String),
}

/// Task lifecycle states. Allowed transitions: CREATED→QUEUED→RUNNING→
/// {COMPLETED, FAILED}, CREATED→FAILED for submission-time rejections, and
/// {CREATED, QUEUED, RUNNING}→CANCELLED.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TaskStatus {
    Created,
    Queued,
    Running,
    Completed,
    Cancelled,
    Failed,
}

impl TaskStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, TaskStatus::Completed | TaskStatus::Cancelled | TaskStatus::Failed)
    }
}

/// What a task executes. The executor derives its RNG seed from the
/// registry seed and the task index; a QUBO payload's schedule seed is
/// replaced accordingly.
#[derive(Debug, Clone)]
pub enum TaskPayload {
    Circuit { circuit: Circuit, measured: Vec<usize> },
    Qubo { problem: QuboProblem, schedule: AnnealSchedule },
}

impl TaskPayload {
    /// Qubits (gate payloads) or logical variables (annealing payloads).
    pub fn requirement(&self) -> u32 {
        match self {
            TaskPayload::Circuit { circuit, .. } => circuit.num_qubits() as u32,
            TaskPayload::Qubo { problem, .. } => problem.num_vars(),
        }
    }

    fn matches(&self, paradigm: Paradigm) -> bool {
        match self {
            TaskPayload::Circuit { .. } => paradigm.executes_circuits(),
            TaskPayload::Qubo { .. } => paradigm == Paradigm::Annealing,
        }
    }
}

/// Caller-facing task snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumTask {
    pub id: String,
    pub device: String,
    pub status: TaskStatus,
    pub shots: u64,
    pub submitted_at_ms: u64,
    pub started_at_ms: Option<u64>,
    pub completed_at_ms: Option<u64>,
    pub failure_reason: Option<String>,
    pub result_key: Option<String>,
    pub history: Vec<TaskStatus>,
}

/// Billing record for one task: `total = task_fee + shots · per_shot_fee`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReceipt {
    pub task_fee: Money,
    pub shot_fee_total: Money,
    pub total: Money,
}

/// Stored result document, one per completed task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDocument {
    pub task_id: String,
    pub device: String,
    pub shots: u64,
    pub submitted_at_ms: u64,
    pub started_at_ms: u64,
    pub completed_at_ms: u64,
    #[serde(flatten)]
    pub data: ResultData,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultData {
    Counts { counts: BTreeMap<String, u64> },
    Samples { samples: Vec<SampleDocument> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleDocument {
    pub assignment: String,
    pub energy: f64,
    pub occurrences: u64,
}

impl SampleDocument {
    fn from_sample(s: &BinarySample) -> Self {
        Self {
            assignment: s.assignment.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            energy: s.energy,
            occurrences: s.occurrences,
        }
    }

    pub fn assignment_bits(&self) -> Vec<bool> {
        self.assignment.chars().map(|c| c == '1').collect()
    }
}

/// Write-once key/blob store standing in for the result bucket.
#[derive(Debug, Default)]
pub struct ObjectStore {
    blobs: BTreeMap<String, Vec<u8>>,
}

impl ObjectStore {
    pub fn put(&mut self, key: &str, blob: Vec<u8>) -> Result<(), CloudError> {
        if self.blobs.contains_key(key) {
            return Err(CloudError::DuplicateKey(key.to_string()));
        }
        self.blobs.insert(key.to_string(), blob);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&[u8]> {
        self.blobs.get(key).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.blobs.keys().map(String::as_str)
    }
}

struct TaskRecord {
    snapshot: QuantumTask,
    payload: TaskPayload,
    seed: u64,
    ready_at_ms: Option<u64>,
}

struct State {
    devices: Vec<DeviceProfile>,
    tasks: Vec<TaskRecord>,
    ids: HashMap<String, usize>,
    queues: HashMap<String, VecDeque<usize>>,
    store: ObjectStore,
    receipts: BTreeMap<String, CostReceipt>,
    clock_ms: u64,
    rng: ChaCha8Rng,
    seed: u64,
}

impl State {
    fn device(&self, name: &str) -> Option<&DeviceProfile> {
        self.devices.iter().find(|d| d.name == name)
    }

    fn transition(&mut self, idx: usize, to: TaskStatus) {
        let task = &mut self.tasks[idx].snapshot;
        debug_assert!(
            allowed_transition(task.status, to),
            "illegal transition {:?} -> {:?}",
            task.status,
            to
        );
        task.status = to;
        task.history.push(to);
    }

    /// Earliest instant at which some queue head becomes runnable.
    fn next_event_ms(&self) -> Option<u64> {
        self.queues
            .values()
            .filter_map(|q| q.front())
            .filter_map(|&idx| self.tasks[idx].ready_at_ms)
            .min()
    }

    /// Runs every queue head whose delay has elapsed; FIFO per device.
    /// Returns indices of tasks that reached a terminal state.
    fn execute_due(&mut self) -> Vec<usize> {
        let mut finished = Vec::new();
        let device_names: Vec<String> = self.devices.iter().map(|d| d.name.clone()).collect();
        for name in device_names {
            loop {
                let Some(&idx) = self.queues.get(&name).and_then(VecDeque::front) else {
                    break;
                };
                match self.tasks[idx].ready_at_ms {
                    Some(t) if t <= self.clock_ms => {}
                    _ => break,
                }
                self.queues.get_mut(&name).unwrap().pop_front();
                self.run_task(idx);
                finished.push(idx);
            }
        }
        finished
    }

    fn run_task(&mut self, idx: usize) {
        let now = self.clock_ms;
        let profile = self
            .device(&self.tasks[idx].snapshot.device)
            .expect("queued task references a known device")
            .clone();
        self.transition(idx, TaskStatus::Running);
        self.tasks[idx].snapshot.started_at_ms = Some(now);

        let shots = self.tasks[idx].snapshot.shots;
        let receipt = receipt_for(&profile, shots);
        self.receipts.insert(self.tasks[idx].snapshot.id.clone(), receipt);

        let seed = self.tasks[idx].seed;
        let outcome = match &self.tasks[idx].payload {
            TaskPayload::Circuit { circuit, measured } => {
                statevector::run(circuit, measured, shots, seed, profile.readout_flip)
                    .map(|r| ResultData::Counts { counts: r.counts })
                    .map_err(|e| e.to_string())
            }
            TaskPayload::Qubo { problem, schedule } => {
                let mut sched = schedule.clone();
                sched.seed = seed;
                let samples = anneal(problem, shots, &sched);
                Ok(ResultData::Samples {
                    samples: samples.iter().map(SampleDocument::from_sample).collect(),
                })
            }
        };

        match outcome {
            Ok(data) => {
                let task = &self.tasks[idx].snapshot;
                let doc = ResultDocument {
                    task_id: task.id.clone(),
                    device: task.device.clone(),
                    shots,
                    submitted_at_ms: task.submitted_at_ms,
                    started_at_ms: now,
                    completed_at_ms: now,
                    data,
                };
                let key = format!("results/{}.json", task.id);
                let blob = serde_json::to_vec(&doc).expect("result document serializes");
                self.store.put(&key, blob).expect("task ids are unique");
                self.transition(idx, TaskStatus::Completed);
                self.tasks[idx].snapshot.completed_at_ms = Some(now);
                self.tasks[idx].snapshot.result_key = Some(key);
            }
            Err(reason) => {
                self.transition(idx, TaskStatus::Failed);
                self.tasks[idx].snapshot.completed_at_ms = Some(now);
                self.tasks[idx].snapshot.failure_reason = Some(reason);
            }
        }
    }
}

fn allowed_transition(from: TaskStatus, to: TaskStatus) -> bool {
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

fn receipt_for(profile: &DeviceProfile, shots: u64) -> CostReceipt {
    let shot_fee_total = profile
        .per_shot_fee
        .checked_mul(shots)
        .expect("shot fees stay within range");
    let total = profile
        .per_task_fee
        .checked_add(shot_fee_total)
        .expect("totals stay within range");
    CostReceipt { task_fee: profile.per_task_fee, shot_fee_total, total }
}

/// The registry: devices, task table, queues, store, receipts and clock
/// behind one lock. All methods take `&self` and are linearizable.
pub struct CloudRegistry {
    inner: Mutex<State>,
    clock_scale: f64,
}

impl CloudRegistry {
    pub fn new(scenario: Scenario) -> Result<Self, scenario::ScenarioError> {
        scenario.validate()?;
        let queues = scenario
            .devices
            .iter()
            .map(|d| (d.name.clone(), VecDeque::new()))
            .collect();
        Ok(Self {
            clock_scale: scenario.clock_scale,
            inner: Mutex::new(State {
                queues,
                devices: scenario.devices,
                tasks: Vec::new(),
                ids: HashMap::new(),
                store: ObjectStore::default(),
                receipts: BTreeMap::new(),
                clock_ms: 0,
                rng: ChaCha8Rng::seed_from_u64(derive_seed(scenario.seed, u64::MAX)),
                seed: scenario.seed,
            }),
        })
    }

    /// Registry from the bundled defaults plus a (possibly empty) override
    /// document.
    pub fn register_scenario(overrides: &ScenarioOverrides) -> Result<Self, scenario::ScenarioError> {
        Self::new(overrides.resolve()?)
    }

    pub fn now_virtual_ms(&self) -> u64 {
        self.inner.lock().unwrap().clock_ms
    }

    pub fn devices(&self) -> Vec<DeviceProfile> {
        self.inner.lock().unwrap().devices.clone()
    }

    pub fn device(&self, name: &str) -> Result<DeviceProfile, CloudError> {
        self.inner
            .lock()
            .unwrap()
            .device(name)
            .cloned()
            .ok_or_else(|| CloudError::UnknownDevice(name.to_string()))
    }

    /// Creates and enqueues a task. Submission-time checks fail the task
    /// immediately (CREATED→FAILED) with zero cost: an unavailable device,
    /// or a payload requirement above the device capacity.
    pub fn submit(
        &self,
        device_name: &str,
        payload: TaskPayload,
        shots: u64,
    ) -> Result<QuantumTask, CloudError> {
        let mut state = self.inner.lock().unwrap();
        let profile = state
            .device(device_name)
            .cloned()
            .ok_or_else(|| CloudError::UnknownDevice(device_name.to_string()))?;
        if !payload.matches(profile.paradigm) {
            return Err(CloudError::PayloadMismatch { device: device_name.to_string() });
        }

        let index = state.tasks.len();
        let id = format!("task-{index:06}");
        let now = state.clock_ms;
        let snapshot = QuantumTask {
            id: id.clone(),
            device: device_name.to_string(),
            status: TaskStatus::Created,
            shots,
            submitted_at_ms: now,
            started_at_ms: None,
            completed_at_ms: None,
            failure_reason: None,
            result_key: None,
            history: vec![TaskStatus::Created],
        };
        let seed = derive_seed(state.seed, index as u64);
        let requirement = payload.requirement();
        state.tasks.push(TaskRecord { snapshot, payload, seed, ready_at_ms: None });
        state.ids.insert(id, index);

        if !profile.available {
            state.transition(index, TaskStatus::Failed);
            state.tasks[index].snapshot.completed_at_ms = Some(now);
            state.tasks[index].snapshot.failure_reason =
                Some(REASON_DEVICE_UNAVAILABLE.to_string());
            return Ok(state.tasks[index].snapshot.clone());
        }
        if !profile.qubit_capacity.admits(requirement) {
            state.transition(index, TaskStatus::Failed);
            state.tasks[index].snapshot.completed_at_ms = Some(now);
            state.tasks[index].snapshot.failure_reason =
                Some(REASON_INSUFFICIENT_QUBITS.to_string());
            return Ok(state.tasks[index].snapshot.clone());
        }

        state.transition(index, TaskStatus::Queued);
        state.tasks[index].ready_at_ms = match profile.queue_delay {
            QueueDelay::Fixed(secs) => Some(now + (secs * 1000.0).round() as u64),
            QueueDelay::Uniform(lo, hi) => {
                let lo_ms = (lo * 1000.0).round() as u64;
                let hi_ms = (hi * 1000.0).round() as u64;
                Some(now + state.rng.random_range(lo_ms..=hi_ms))
            }
            QueueDelay::Unbounded => None,
        };
        state
            .queues
            .get_mut(device_name)
            .expect("every device has a queue")
            .push_back(index);
        Ok(state.tasks[index].snapshot.clone())
    }

    pub fn task(&self, id: &str) -> Result<QuantumTask, CloudError> {
        let state = self.inner.lock().unwrap();
        let &idx = state.ids.get(id).ok_or_else(|| CloudError::UnknownTask(id.to_string()))?;
        Ok(state.tasks[idx].snapshot.clone())
    }

    /// Advances the virtual clock to the next queue event (if any) and runs
    /// everything that became due. Returns tasks that reached a terminal
    /// state during the call.
    pub fn execute_pending(&self) -> Vec<QuantumTask> {
        let mut state = self.inner.lock().unwrap();
        let mut done = state.execute_due();
        if done.is_empty() {
            if let Some(t) = state.next_event_ms() {
                state.clock_ms = state.clock_ms.max(t);
                done = state.execute_due();
            }
        }
        done.into_iter().map(|i| state.tasks[i].snapshot.clone()).collect()
    }

    /// Blocks (in virtual time) until the task is terminal or `timeout`
    /// virtual seconds have elapsed; a timed-out task is CANCELLED and its
    /// final snapshot returned. Never busy-waits in real time: each
    /// iteration either advances the virtual clock or returns. With a
    /// positive clock scale, each virtual advance also sleeps
    /// `scale × delta` in real time.
    pub fn poll(&self, id: &str, timeout_secs: f64) -> Result<QuantumTask, CloudError> {
        let timeout_ms = (timeout_secs.max(0.0) * 1000.0).round() as u64;
        let deadline = {
            let state = self.inner.lock().unwrap();
            if !state.ids.contains_key(id) {
                return Err(CloudError::UnknownTask(id.to_string()));
            }
            state.clock_ms + timeout_ms
        };
        loop {
            let wait_target;
            {
                let mut state = self.inner.lock().unwrap();
                let idx = state.ids[id];
                if state.tasks[idx].snapshot.status.is_terminal() {
                    return Ok(state.tasks[idx].snapshot.clone());
                }
                if !state.execute_due().is_empty() {
                    continue;
                }
                match state.next_event_ms() {
                    Some(t) if t <= deadline => wait_target = t,
                    _ => {
                        // nothing can finish before the deadline: cancel
                        let delta = deadline.saturating_sub(state.clock_ms);
                        state.clock_ms = deadline;
                        let device = state.tasks[idx].snapshot.device.clone();
                        if let Some(q) = state.queues.get_mut(&device) {
                            q.retain(|&i| i != idx);
                        }
                        state.transition(idx, TaskStatus::Cancelled);
                        state.tasks[idx].snapshot.completed_at_ms = Some(deadline);
                        let snapshot = state.tasks[idx].snapshot.clone();
                        drop(state);
                        self.pace(delta);
                        return Ok(snapshot);
                    }
                }
            }
            // advance outside the lock so concurrent callers keep moving
            let delta = {
                let mut state = self.inner.lock().unwrap();
                let delta = wait_target.saturating_sub(state.clock_ms);
                state.clock_ms = state.clock_ms.max(wait_target);
                state.execute_due();
                delta
            };
            self.pace(delta);
        }
    }

    fn pace(&self, virtual_ms: u64) {
        if self.clock_scale > 0.0 && virtual_ms > 0 {
            let real = Duration::from_secs_f64(virtual_ms as f64 / 1000.0 * self.clock_scale);
            std::thread::sleep(real);
        }
    }

    /// Price of executing `shots` on a device, independent of any task.
    pub fn price(&self, device_name: &str, shots: u64) -> Result<CostReceipt, CloudError> {
        let profile = self.device(device_name)?;
        Ok(receipt_for(&profile, shots))
    }

    /// Receipt recorded when the task started running, if it ever did.
    pub fn receipt(&self, task_id: &str) -> Option<CostReceipt> {
        self.inner.lock().unwrap().receipts.get(task_id).copied()
    }

    pub fn receipts(&self) -> BTreeMap<String, CostReceipt> {
        self.inner.lock().unwrap().receipts.clone()
    }

    pub fn fetch_result(&self, key: &str) -> Option<Vec<u8>> {
        self.inner.lock().unwrap().store.get(key).map(<[u8]>::to_vec)
    }

    pub fn result_document(&self, key: &str) -> Option<ResultDocument> {
        let blob = self.fetch_result(key)?;
        serde_json::from_slice(&blob).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bundled_instance;
    use crate::qpe;
    use crate::qubo::{default_penalty, encode_tsp_qubo};

    fn gate_payload() -> TaskPayload {
        let m = bundled_instance();
        let enc = qpe::encode_phases(&m, 6).unwrap();
        let eig = qpe::enumerate_eigenstates(&m).unwrap().remove(2);
        let qc = qpe::build_qpe_circuit(&enc, &eig).unwrap();
        TaskPayload::Circuit { circuit: qc.circuit, measured: qc.measured }
    }

    fn qubo_payload() -> TaskPayload {
        let m = bundled_instance();
        let problem = encode_tsp_qubo(&m, default_penalty(&m)).unwrap();
        let schedule = AnnealSchedule::scaled_to(&problem, 0);
        TaskPayload::Qubo { problem, schedule }
    }

    fn paper_registry() -> CloudRegistry {
        CloudRegistry::new(Scenario::paper()).unwrap()
    }

    #[test]
    fn ionq_rejects_oversized_circuit_at_submission() {
        let reg = paper_registry();
        let task = reg.submit("ionq", gate_payload(), 100).unwrap();
        assert_eq!(task.status, TaskStatus::Failed);
        assert_eq!(task.failure_reason.as_deref(), Some(REASON_INSUFFICIENT_QUBITS));
        assert_eq!(task.history, vec![TaskStatus::Created, TaskStatus::Failed]);
        assert!(reg.receipt(&task.id).is_none());
    }

    #[test]
    fn unavailable_device_fails_immediately() {
        let reg = paper_registry();
        let task = reg.submit("riggeti_aspen8", gate_payload(), 100).unwrap();
        assert_eq!(task.status, TaskStatus::Failed);
        assert_eq!(task.failure_reason.as_deref(), Some(REASON_DEVICE_UNAVAILABLE));
    }

    #[test]
    fn local_submission_queues_then_completes() {
        let reg = paper_registry();
        let task = reg.submit("local", gate_payload(), 64).unwrap();
        assert_eq!(task.status, TaskStatus::Queued);
        let done = reg.poll(&task.id, 1.0).unwrap();
        assert_eq!(done.status, TaskStatus::Completed);
        assert_eq!(done.completed_at_ms, Some(0));
        let doc = reg.result_document(done.result_key.as_deref().unwrap()).unwrap();
        assert_eq!(doc.shots, 64);
        assert!(matches!(doc.data, ResultData::Counts { .. }));
    }

    #[test]
    fn unknown_device_creates_no_task() {
        let reg = paper_registry();
        assert!(matches!(
            reg.submit("nope", gate_payload(), 1),
            Err(CloudError::UnknownDevice(_))
        ));
        assert!(matches!(reg.task("task-000000"), Err(CloudError::UnknownTask(_))));
    }

    #[test]
    fn paradigm_mismatch_is_rejected() {
        let reg = paper_registry();
        assert!(matches!(
            reg.submit("dwave_dw2000", gate_payload(), 1),
            Err(CloudError::PayloadMismatch { .. })
        ));
        assert!(matches!(
            reg.submit("local", qubo_payload(), 1),
            Err(CloudError::PayloadMismatch { .. })
        ));
    }

    #[test]
    fn dwave_fixed_delay_shows_in_timestamps() {
        let reg = paper_registry();
        let task = reg.submit("dwave_dw2000", qubo_payload(), 50).unwrap();
        let done = reg.poll(&task.id, 60.0).unwrap();
        assert_eq!(done.status, TaskStatus::Completed);
        assert_eq!(done.started_at_ms.unwrap() - done.submitted_at_ms, 21_000);
    }

    #[test]
    fn sv1_queue_is_fifo() {
        let reg = paper_registry();
        let a = reg.submit("sv1", gate_payload(), 10).unwrap();
        let b = reg.submit("sv1", gate_payload(), 10).unwrap();
        let b_done = reg.poll(&b.id, 300.0).unwrap();
        let a_done = reg.task(&a.id).unwrap();
        assert_eq!(a_done.status, TaskStatus::Completed);
        assert!(b_done.started_at_ms.unwrap() >= a_done.completed_at_ms.unwrap());
    }

    #[test]
    fn unbounded_queue_cancels_on_timeout() {
        let reg = paper_registry();
        let task = reg.submit("riggeti_aspen9", gate_payload(), 1000).unwrap();
        let before = reg.now_virtual_ms();
        let done = reg.poll(&task.id, 300.0).unwrap();
        assert_eq!(done.status, TaskStatus::Cancelled);
        assert_eq!(reg.now_virtual_ms() - before, 300_000);
        // a second poll returns immediately with the terminal snapshot
        let again = reg.poll(&task.id, 300.0).unwrap();
        assert_eq!(again.status, TaskStatus::Cancelled);
        assert_eq!(reg.now_virtual_ms() - before, 300_000);
    }

    #[test]
    fn execute_pending_advances_to_next_event() {
        let reg = paper_registry();
        let task = reg.submit("dwave_advantage", qubo_payload(), 20).unwrap();
        let done = reg.execute_pending();
        assert_eq!(done.len(), 1);
        assert_eq!(done[0].id, task.id);
        assert_eq!(done[0].started_at_ms, Some(25_000));
        assert!(reg.execute_pending().is_empty());
    }

    #[test]
    fn pricing_matches_fee_arithmetic() {
        let reg = paper_registry();
        let r = reg.price("riggeti_aspen9", 1000).unwrap();
        assert_eq!(r.total.to_string(), "0.65");
        let zero = reg.price("local", 1000).unwrap();
        assert_eq!(zero.total, Money::ZERO);
        let r10 = reg.price("riggeti_aspen9", 10_000).unwrap();
        assert_eq!(r10.shot_fee_total.micros(), 10 * r.shot_fee_total.micros());
    }

    #[test]
    fn annealing_result_document_round_trips() {
        let reg = paper_registry();
        let task = reg.submit("dwave_dw2000", qubo_payload(), 30).unwrap();
        let done = reg.poll(&task.id, 60.0).unwrap();
        let doc = reg.result_document(done.result_key.as_deref().unwrap()).unwrap();
        match doc.data {
            ResultData::Samples { samples } => {
                assert_eq!(samples.iter().map(|s| s.occurrences).sum::<u64>(), 30);
                assert_eq!(samples[0].assignment.len(), 16);
            }
            ResultData::Counts { .. } => panic!("expected samples"),
        }
    }

    #[test]
    fn object_store_is_write_once() {
        let mut store = ObjectStore::default();
        store.put("k", b"one".to_vec()).unwrap();
        assert!(matches!(store.put("k", b"two".to_vec()), Err(CloudError::DuplicateKey(_))));
        assert_eq!(store.get("k"), Some(&b"one"[..]));
        assert_eq!(store.get("absent"), None);
    }

    #[test]
    fn identical_scripts_produce_identical_histories() {
        let run_script = || {
            let reg = paper_registry();
            let mut out = Vec::new();
            out.push(reg.submit("dwave_dw2000", qubo_payload(), 40).unwrap().id);
            out.push(reg.submit("sv1", gate_payload(), 25).unwrap().id);
            out.push(reg.submit("local", gate_payload(), 25).unwrap().id);
            let snapshots: Vec<QuantumTask> = out
                .iter()
                .map(|id| reg.poll(id, 120.0).unwrap())
                .collect();
            let results: Vec<Option<Vec<u8>>> = snapshots
                .iter()
                .map(|t| t.result_key.as_deref().and_then(|k| reg.fetch_result(k)))
                .collect();
            (snapshots, results, reg.now_virtual_ms())
        };
        assert_eq!(run_script(), run_script());
    }
}
