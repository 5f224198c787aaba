//! TSP solving on two simulated quantum paradigms — QUBO annealing and
//! gate-based phase estimation — plus a virtual quantum-cloud layer that
//! reproduces device heterogeneity, task lifecycles, latency and pricing.

pub mod anneal;
pub mod cloud;
pub mod graph;
pub mod qpe;
pub mod qubo;
pub mod seeding;
pub mod statevector;

pub use anneal::{anneal, AnnealSchedule, BinarySample};
pub use cloud::{CloudRegistry, CostReceipt, Money, QuantumTask, Scenario, TaskPayload, TaskStatus};
pub use graph::{
    brute_force_optimum, bundled_instance, parse_matrix, serialize_matrix, tour_cost,
    tours_equivalent, CostMatrix, Tour,
};
pub use qpe::{
    build_qpe_circuit, encode_phases, enumerate_eigenstates, estimate_phase, qubit_requirement,
    solve_gate_tsp, CycleEigenstate, GateSolution, PhaseEncoding, PhaseEstimate,
};
pub use qubo::{decode_tour, default_penalty, encode_tsp_qubo, QuboProblem};
pub use statevector::{inverse_qft, run, Circuit, Gate, ShotResult, StateVector};
