//! Cross-checks the phase-estimation pipeline against the closed-form
//! outcome distribution for a single eigenphase, and against the
//! brute-force tour oracle.

use qtsp_core::graph::{
    brute_force_optimum, bundled_instance, random_symmetric_matrix, tour_cost, tours_equivalent,
};
use qtsp_core::qpe::{
    build_qpe_circuit, eigenphase, encode_phases, enumerate_eigenstates, solve_gate_tsp,
};
use qtsp_core::statevector::StateVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent oracle: probability of reading mode `m` from a t-bit phase
/// register when the eigenphase is θ. Derived from the geometric sum over
/// the register, not from the simulator.
fn qpe_kernel(theta: f64, phase_bits: usize, mode: u64) -> f64 {
    let size = (1u64 << phase_bits) as f64;
    let delta = theta - mode as f64 / size;
    let denom = (std::f64::consts::PI * delta).sin() * size;
    if denom.abs() < 1e-15 {
        return 1.0;
    }
    let numer = (std::f64::consts::PI * delta * size).sin();
    (numer / denom).powi(2)
}

fn exact_phase_distribution(
    m: &qtsp_core::CostMatrix,
    phase_bits: usize,
    eig: &qtsp_core::CycleEigenstate,
) -> Vec<f64> {
    let enc = encode_phases(m, phase_bits).unwrap();
    let qpe = build_qpe_circuit(&enc, eig).unwrap();
    let mut state = StateVector::zero(qpe.circuit.num_qubits());
    for g in qpe.circuit.gates() {
        state.apply(g).unwrap();
    }
    state.marginal_probabilities(&qpe.measured).unwrap()
}

fn argmax(probs: &[f64]) -> u64 {
    let mut best = 0usize;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best as u64
}

#[test]
fn phase_register_distribution_matches_kernel() {
    let m = bundled_instance();
    let enc = encode_phases(&m, 6).unwrap();
    for eig in enumerate_eigenstates(&m).unwrap() {
        let theta = eigenphase(&enc, &eig);
        let probs = exact_phase_distribution(&m, 6, &eig);
        for (mode, &p) in probs.iter().enumerate() {
            let expected = qpe_kernel(theta, 6, mode as u64);
            assert!(
                (p - expected).abs() < 1e-9,
                "tour {:?} mode {mode}: {p} vs {expected}",
                eig.tour.order()
            );
        }
    }
}

#[test]
fn kernel_argmax_matches_frozen_bundled_modes() {
    let m = bundled_instance();
    let eigs = enumerate_eigenstates(&m).unwrap();
    let expected_modes = [37u64, 41, 16]; // tours (0,1,2,3), (0,1,3,2), (0,2,1,3)
    for (eig, want) in eigs.iter().zip(expected_modes) {
        let probs = exact_phase_distribution(&m, 6, eig);
        assert_eq!(argmax(&probs), want);
    }
}

// Whenever two eigenphases differ by more than one register bin, the exact
// argmax modes order the same way the tour costs do.
#[test]
fn mode_ordering_follows_cost_ordering_when_resolvable() {
    let phase_bits = 6usize;
    let resolution = 1.0 / (1u64 << phase_bits) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..25 {
        let m = random_symmetric_matrix(4, 10, &mut rng);
        let enc = encode_phases(&m, phase_bits).unwrap();
        let eigs = enumerate_eigenstates(&m).unwrap();
        let data: Vec<(f64, u64, f64)> = eigs
            .iter()
            .map(|e| {
                let probs = exact_phase_distribution(&m, phase_bits, e);
                let cost = tour_cost(&m, &e.tour).unwrap();
                (eigenphase(&enc, e), argmax(&probs), cost)
            })
            .collect();
        for a in &data {
            for b in &data {
                if (a.0 - b.0).abs() > resolution {
                    assert_eq!(
                        a.1 < b.1,
                        a.2 < b.2,
                        "θ {} vs {} -> modes {} vs {}",
                        a.0,
                        b.0,
                        a.1,
                        b.1
                    );
                }
            }
        }
    }
}

// Gate solver vs brute force on random instances: at 8 phase bits at least
// 90% must agree, and every disagreement must come from two candidate
// tours whose eigenphases collide within the register resolution.
#[test]
fn gate_solver_agrees_with_brute_force_oracle() {
    let phase_bits = 8usize;
    let resolution = 1.0 / (1u64 << phase_bits) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut matches = 0;
    for trial in 0..50u64 {
        let m = random_symmetric_matrix(4, 10, &mut rng);
        let (best_tour, best_cost) = brute_force_optimum(&m).unwrap();
        let sol = solve_gate_tsp(&m, 4096, phase_bits, 1000 + trial, 0.0).unwrap();
        if tours_equivalent(&sol.tour, &best_tour, true) {
            matches += 1;
        } else {
            let enc = encode_phases(&m, phase_bits).unwrap();
            let theta_best = best_cost * enc.scale() / std::f64::consts::TAU;
            let returned_cost = tour_cost(&m, &sol.tour).unwrap();
            let theta_returned = returned_cost * enc.scale() / std::f64::consts::TAU;
            assert!(
                (theta_returned - theta_best).abs() <= resolution,
                "mismatch on trial {trial} without a phase collision: {theta_returned} vs {theta_best}"
            );
        }
    }
    assert!(matches >= 45, "only {matches}/50 agreed with the oracle");
}
