//! Gate-based TSP solving via phase estimation: each Hamiltonian cycle is
//! prepared as a basis eigenstate of a diagonal unitary whose eigenphase is
//! the tour's total encoded cost; the phase register is read out per
//! eigenstate and the smallest measured phase wins.

use std::f64::consts::TAU;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{tour_cost, CostMatrix, GraphError, Tour};
use crate::seeding::derive_seed;
use crate::statevector::{self, Circuit, Gate, ShotResult, SimulatorError, MAX_QUBITS};

/// Phase-register width used when callers do not override it.
pub const DEFAULT_PHASE_BITS: usize = 6;

/// City-count cap for eigenstate enumeration ((n−1)! circuits).
pub const MAX_EIGENSTATE_CITIES: usize = 6;

/// Decimal rescaling cap when turning fractional costs into integers.
const MAX_DECIMAL_SHIFT: u32 = 6;

#[derive(Debug, Error)]
pub enum QpeError {
    #[error("all travel costs are zero; phases cannot be encoded")]
    DegenerateInstance,
    #[error("phase register needs at least one bit")]
    NoPhaseBits,
    #[error("{got} cities exceeds the eigenstate-enumeration cap of {max}")]
    TooManyCities { got: usize, max: usize },
    #[error("circuit needs {needed} qubits, exceeding the cap of {cap}")]
    QubitBudget { needed: usize, cap: usize },
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-edge phases `phi[i][j] = scale · cost[i][j]`, scaled so that every
/// tour's total phase stays strictly below 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEncoding {
    phi: Vec<Vec<f64>>,
    scale: f64,
    bits_per_city: usize,
    phase_bits: usize,
}

impl PhaseEncoding {
    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self, from: usize, to: usize) -> f64 {
        self.phi[from][to]
    }

    /// Radians per original cost unit.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bits_per_city(&self) -> usize {
        self.bits_per_city
    }

    pub fn phase_bits(&self) -> usize {
        self.phase_bits
    }

    pub fn eigenstate_qubits(&self) -> usize {
        self.n() * self.bits_per_city
    }

    pub fn total_qubits(&self) -> usize {
        self.eigenstate_qubits() + self.phase_bits
    }

    /// Global indices of the phase register, most significant first.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let base = self.eigenstate_qubits();
        (base..base + self.phase_bits).collect()
    }
}

/// A Hamiltonian cycle as an eigenstate: each city's successor code,
/// city 0's code first.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleEigenstate {
    pub tour: Tour,
    pub successor: Vec<usize>,
    pub basis_string: String,
}

/// Outcome of phase estimation for one eigenstate.
#[derive(Debug, Clone)]
pub struct PhaseEstimate {
    pub eigenstate: CycleEigenstate,
    pub measured_mode: u64,
    pub theta: f64,
    pub counts: ShotResult,
}

/// Result of the full gate-based solve.
#[derive(Debug, Clone)]
pub struct GateSolution {
    pub tour: Tour,
    pub estimates: Vec<PhaseEstimate>,
    /// True when two eigenstates tied on measured mode and the classical
    /// cost comparison decided.
    pub tie_break_used: bool,
}

fn bits_for(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Scales the cost matrix into phases with `scale = 2π / (n·max + 1)` over
/// the canonical integer form of the costs (decimal-shifted into integers,
/// then divided by their gcd). Integer-multiple matrices therefore share
/// identical phases.
pub fn encode_phases(m: &CostMatrix, phase_bits: usize) -> Result<PhaseEncoding, QpeError> {
    if phase_bits == 0 {
        return Err(QpeError::NoPhaseBits);
    }
    if m.max_cost() <= 0.0 {
        return Err(QpeError::DegenerateInstance);
    }
    let n = m.n();

    let mut shift = 0u32;
    while shift < MAX_DECIMAL_SHIFT {
        let factor = 10f64.powi(shift as i32);
        let integral = (0..n).all(|i| {
            (0..n).all(|j| {
                let v = m.cost(i, j) * factor;
                (v - v.round()).abs() <= 1e-9 * factor.max(1.0)
            })
        });
        if integral {
            break;
        }
        shift += 1;
    }
    let factor = 10f64.powi(shift as i32);
    let ints: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| (m.cost(i, j) * factor).round() as u64).collect())
        .collect();
    let g = ints
        .iter()
        .flatten()
        .filter(|&&v| v != 0)
        .fold(0u64, |acc, &v| gcd(acc, v));
    if g == 0 {
        return Err(QpeError::DegenerateInstance);
    }
    let max_reduced = ints.iter().flatten().map(|&v| v / g).max().unwrap();
    let unit = TAU / (n as f64 * max_reduced as f64 + 1.0);
    let phi: Vec<Vec<f64>> = ints
        .iter()
        .map(|row| row.iter().map(|&v| (v / g) as f64 * unit).collect())
        .collect();
    Ok(PhaseEncoding {
        phi,
        scale: unit * factor / g as f64,
        bits_per_city: bits_for(n),
        phase_bits,
    })
}

/// One eigenstate per depot-rooted directed Hamiltonian cycle, reversal
/// duplicates removed when the matrix is symmetric. Lexicographic tour
/// order.
pub fn enumerate_eigenstates(m: &CostMatrix) -> Result<Vec<CycleEigenstate>, QpeError> {
    let n = m.n();
    if n > MAX_EIGENSTATE_CITIES {
        return Err(QpeError::TooManyCities { got: n, max: MAX_EIGENSTATE_CITIES });
    }
    let bits = bits_for(n);
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..n).collect();
    loop {
        let skip = m.symmetric() && n > 2 && rest[0] > rest[n - 2];
        if !skip {
            let mut order = Vec::with_capacity(n);
            order.push(0);
            order.extend_from_slice(&rest);
            let tour = Tour::new(order).expect("depot-rooted permutation");
            let mut successor = vec![0usize; n];
            for i in 0..n {
                successor[tour.order()[i]] = tour.order()[(i + 1) % n];
            }
            let mut basis_string = String::with_capacity(n * bits);
            for &succ in &successor {
                for b in (0..bits).rev() {
                    basis_string.push(if succ >> b & 1 == 1 { '1' } else { '0' });
                }
            }
            out.push(CycleEigenstate { tour, successor, basis_string });
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(items: &mut [usize]) -> bool {
    let n = items.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// Eigenphase of a cycle under an encoding, as a fraction of 2π. Always in
/// (0, 1) by construction of the encoding.
pub fn eigenphase(enc: &PhaseEncoding, eig: &CycleEigenstate) -> f64 {
    let total: f64 = eig
        .successor
        .iter()
        .enumerate()
        .map(|(city, &succ)| enc.phi(city, succ))
        .sum();
    total / TAU
}

/// A phase-estimation circuit plus the qubits to measure.
#[derive(Debug, Clone)]
pub struct QpeCircuit {
    pub circuit: Circuit,
    pub measured: Vec<usize>,
}

/// Builds the estimation circuit for one eigenstate: X-gate preparation of
/// the successor codes, Hadamards on the phase register, one controlled
/// diagonal per phase bit (table doubled per significance step), and the
/// inverse QFT. Only the phase register is measured.
pub fn build_qpe_circuit(
    enc: &PhaseEncoding,
    eig: &CycleEigenstate,
) -> Result<QpeCircuit, QpeError> {
    let n = enc.n();
    let bits = enc.bits_per_city();
    let eigen_qubits = enc.eigenstate_qubits();
    let total = enc.total_qubits();
    if total > MAX_QUBITS {
        return Err(QpeError::QubitBudget { needed: total, cap: MAX_QUBITS });
    }

    let mut circuit = Circuit::new(total);
    for (idx, ch) in eig.basis_string.chars().enumerate() {
        if ch == '1' {
            circuit.x(idx)?;
        }
    }
    for q in eigen_qubits..total {
        circuit.h(q)?;
    }

    // Diagonal of U = U_1 ⊗ … ⊗ U_n over the eigenstate register: the sum
    // of each city's phase toward its coded successor. Codes that point at
    // the city itself or past n are unreachable from valid preparations and
    // get phase 0.
    let table_len = 1usize << eigen_qubits;
    let mut base_table = vec![0.0f64; table_len];
    let code_mask = (1usize << bits) - 1;
    for (word, entry) in base_table.iter_mut().enumerate() {
        let mut phase = 0.0;
        for city in 0..n {
            let code = (word >> ((n - 1 - city) * bits)) & code_mask;
            if code < n && code != city {
                phase += enc.phi(city, code);
            }
        }
        *entry = phase;
    }

    let targets: Vec<usize> = (0..eigen_qubits).collect();
    let phase_bits = enc.phase_bits();
    for k in 0..phase_bits {
        let control = eigen_qubits + (phase_bits - 1 - k);
        let factor = (1u64 << k) as f64;
        circuit.push(Gate::CDiag {
            controls: vec![control],
            targets: targets.clone(),
            phase_table: base_table.iter().map(|p| p * factor).collect(),
        })?;
    }
    circuit.extend(statevector::inverse_qft(phase_bits, eigen_qubits))?;

    Ok(QpeCircuit { circuit, measured: enc.measured_qubits() })
}

/// Runs one eigenstate's circuit and reads the most frequent phase-register
/// mode (ties toward the smaller integer).
pub fn estimate_phase(
    enc: &PhaseEncoding,
    eig: &CycleEigenstate,
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<PhaseEstimate, QpeError> {
    let qpe = build_qpe_circuit(enc, eig)?;
    let counts = statevector::run(&qpe.circuit, &qpe.measured, shots, seed, readout_flip)?;
    Ok(phase_estimate_from_counts(enc, eig.clone(), counts))
}

/// Classical post-processing shared with the service layer, which gets its
/// counts back from the task store rather than from a direct run.
pub fn phase_estimate_from_counts(
    enc: &PhaseEncoding,
    eigenstate: CycleEigenstate,
    counts: ShotResult,
) -> PhaseEstimate {
    let (measured_mode, _) = counts.top_outcome().expect("at least one shot recorded");
    let theta = measured_mode as f64 / (1u64 << enc.phase_bits()) as f64;
    PhaseEstimate { eigenstate, measured_mode, theta, counts }
}

/// Picks the estimate with the minimum measured mode; ties are broken by
/// classical tour cost. Returns (index, tie_break_used).
pub fn select_minimum_mode(
    m: &CostMatrix,
    estimates: &[PhaseEstimate],
) -> Result<(usize, bool), QpeError> {
    assert!(!estimates.is_empty(), "need at least one estimate");
    let min_mode = estimates.iter().map(|e| e.measured_mode).min().unwrap();
    let tied: Vec<usize> = estimates
        .iter()
        .enumerate()
        .filter(|(_, e)| e.measured_mode == min_mode)
        .map(|(i, _)| i)
        .collect();
    if tied.len() == 1 {
        return Ok((tied[0], false));
    }
    let mut best = tied[0];
    let mut best_cost = tour_cost(m, &estimates[best].eigenstate.tour)?;
    for &i in &tied[1..] {
        let c = tour_cost(m, &estimates[i].eigenstate.tour)?;
        if c < best_cost {
            best = i;
            best_cost = c;
        }
    }
    Ok((best, true))
}

/// Full gate-based solve: estimates every eigenstate's phase (in parallel,
/// with seeds derived per index) and returns the minimum-mode tour.
pub fn solve_gate_tsp(
    m: &CostMatrix,
    shots: u64,
    phase_bits: usize,
    seed: u64,
    readout_flip: f64,
) -> Result<GateSolution, QpeError> {
    let enc = encode_phases(m, phase_bits)?;
    let eigenstates = enumerate_eigenstates(m)?;
    let estimates: Vec<PhaseEstimate> = eigenstates
        .into_par_iter()
        .enumerate()
        .map(|(i, eig)| estimate_phase(&enc, &eig, shots, derive_seed(seed, i as u64), readout_flip))
        .collect::<Result<_, _>>()?;
    let (winner, tie_break_used) = select_minimum_mode(m, &estimates)?;
    Ok(GateSolution {
        tour: estimates[winner].eigenstate.tour.clone(),
        estimates,
        tie_break_used,
    })
}

/// Qubits needed by the estimation circuit: n·⌈log₂ n⌉ + phase_bits.
pub fn qubit_requirement(n: usize, phase_bits: usize) -> usize {
    assert!(n >= 2, "need at least two cities");
    n * bits_for(n) + phase_bits
}
