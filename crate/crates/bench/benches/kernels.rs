//! Throughput of the three hot paths: gate application on the statevector,
//! the full phase-estimation pipeline, and the annealing sampler.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use qtsp_core::anneal::{anneal, AnnealSchedule};
use qtsp_core::graph::bundled_instance;
use qtsp_core::qpe::{build_qpe_circuit, encode_phases, enumerate_eigenstates};
use qtsp_core::qubo::{default_penalty, encode_tsp_qubo};
use qtsp_core::statevector::{inverse_qft, Gate, StateVector};

fn bench_gates(c: &mut Criterion) {
    let qubits = 16usize;
    let dim = 1u64 << qubits;
    let mut group = c.benchmark_group("statevector");
    group.throughput(Throughput::Elements(dim));

    group.bench_function("hadamard_16q", |b| {
        b.iter_batched_ref(
            || StateVector::zero(qubits),
            |s| s.apply(&Gate::H { qubit: 7 }).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("inverse_qft_8_of_16q", |b| {
        let gates = inverse_qft(8, 4);
        b.iter_batched_ref(
            || StateVector::zero(qubits),
            |s| {
                for g in &gates {
                    s.apply(g).unwrap();
                }
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn bench_qpe(c: &mut Criterion) {
    let m = bundled_instance();
    let enc = encode_phases(&m, 6).unwrap();
    let eig = enumerate_eigenstates(&m).unwrap().remove(2);
    c.bench_function("qpe_circuit_14q_run_1000_shots", |b| {
        b.iter(|| {
            let qpe = build_qpe_circuit(&enc, &eig).unwrap();
            qtsp_core::statevector::run(&qpe.circuit, &qpe.measured, 1000, 7, 0.0).unwrap()
        })
    });
}

fn bench_anneal(c: &mut Criterion) {
    let m = bundled_instance();
    let q = encode_tsp_qubo(&m, default_penalty(&m)).unwrap();
    let sched = AnnealSchedule { sweeps: 128, t_initial: 41.0, t_final: 0.01, seed: 1 };
    let mut group = c.benchmark_group("anneal");
    group.throughput(Throughput::Elements(1000 * 128 * 16));
    group.bench_function("tsp4_1000_shots_128_sweeps", |b| b.iter(|| anneal(&q, 1000, &sched)));
    group.finish();
}

criterion_group!(benches, bench_gates, bench_qpe, bench_anneal);
criterion_main!(benches);
