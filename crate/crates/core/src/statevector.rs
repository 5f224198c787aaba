//! Exact statevector simulation of the gate set needed by the phase
//! estimation circuits: X, H, phase rotations, SWAP and a controlled
//! diagonal defined by a phase table.
//!
//! Convention used everywhere: qubit 0 is the most significant bit of a
//! basis label, so |01⟩ means qubit 0 in |0⟩ and qubit 1 in |1⟩.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hard cap on simulated register width: 2^24 amplitudes ≈ 256 MiB.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("gate uses qubit {index} more than once")]
    DuplicateQubit { index: usize },
    #[error("phase table has {got} entries, expected {expected}")]
    BadPhaseTable { expected: usize, got: usize },
    #[error("{got} qubits exceeds the simulator cap of {max}")]
    TooManyQubits { got: usize, max: usize },
    #[error("measured qubit list must be strictly increasing and non-empty")]
    BadMeasuredList,
    #[error("amplitude vector of length {0} is not a power of two")]
    BadAmplitudeCount(usize),
    #[error("state norm {0} is not 1 within 1e-9")]
    NotNormalized(f64),
    #[error("readout flip probability {0} must lie in [0, 0.5]")]
    BadFlipProbability(f64),
    #[error("shots must be at least 1")]
    NoShots,
}

/// A single gate. Angles are radians.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X { qubit: usize },
    H { qubit: usize },
    Phase { qubit: usize, theta: f64 },
    CPhase { control: usize, target: usize, theta: f64 },
    Swap { a: usize, b: usize },
    /// Multiplies the amplitude of every basis state whose control bits are
    /// all 1 by `exp(i · phase_table[t])`, where `t` is the sub-word formed
    /// by the target qubits (first listed target = most significant).
    CDiag { controls: Vec<usize>, targets: Vec<usize>, phase_table: Vec<f64> },
}

impl Gate {
    /// Qubits the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { qubit } | Gate::H { qubit } | Gate::Phase { qubit, .. } => vec![*qubit],
            Gate::CPhase { control, target, .. } => vec![*control, *target],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::CDiag { controls, targets, .. } => {
                controls.iter().chain(targets.iter()).cloned().collect()
            }
        }
    }

    /// The inverse gate; applying a gate then its inverse is the identity.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::X { .. } | Gate::H { .. } | Gate::Swap { .. } => self.clone(),
            Gate::Phase { qubit, theta } => Gate::Phase { qubit: *qubit, theta: -theta },
            Gate::CPhase { control, target, theta } => {
                Gate::CPhase { control: *control, target: *target, theta: -theta }
            }
            Gate::CDiag { controls, targets, phase_table } => Gate::CDiag {
                controls: controls.clone(),
                targets: targets.clone(),
                phase_table: phase_table.iter().map(|p| -p).collect(),
            },
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), SimulatorError> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= num_qubits {
                return Err(SimulatorError::IndexOutOfRange { index: q, num_qubits });
            }
        }
        let mut seen = vec![false; num_qubits];
        for &q in &qubits {
            if seen[q] {
                return Err(SimulatorError::DuplicateQubit { index: q });
            }
            seen[q] = true;
        }
        if let Gate::CDiag { targets, phase_table, .. } = self {
            let expected = 1usize << targets.len();
            if phase_table.len() != expected {
                return Err(SimulatorError::BadPhaseTable {
                    expected,
                    got: phase_table.len(),
                });
            }
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed register width.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), SimulatorError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), SimulatorError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn x(&mut self, qubit: usize) -> Result<(), SimulatorError> {
        self.push(Gate::X { qubit })
    }

    pub fn h(&mut self, qubit: usize) -> Result<(), SimulatorError> {
        self.push(Gate::H { qubit })
    }
}

/// 2^q complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |00…0⟩.
    pub fn zero(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1 && num_qubits <= 30, "unreasonable register width");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimulatorError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimulatorError::BadAmplitudeCount(len));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimulatorError::NotNormalized(norm));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimulatorError> {
        gate.validate(self.num_qubits)?;
        let dim = self.amplitudes.len();
        match gate {
            Gate::X { qubit } => {
                let m = self.mask(*qubit);
                for b in 0..dim {
                    if b & m == 0 {
                        self.amplitudes.swap(b, b | m);
                    }
                }
            }
            Gate::H { qubit } => {
                let m = self.mask(*qubit);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for b in 0..dim {
                    if b & m == 0 {
                        let a0 = self.amplitudes[b];
                        let a1 = self.amplitudes[b | m];
                        self.amplitudes[b] = (a0 + a1) * s;
                        self.amplitudes[b | m] = (a0 - a1) * s;
                    }
                }
            }
            Gate::Phase { qubit, theta } => {
                let m = self.mask(*qubit);
                let ph = Complex64::from_polar(1.0, *theta);
                for b in 0..dim {
                    if b & m != 0 {
                        self.amplitudes[b] *= ph;
                    }
                }
            }
            Gate::CPhase { control, target, theta } => {
                let m = self.mask(*control) | self.mask(*target);
                let ph = Complex64::from_polar(1.0, *theta);
                for b in 0..dim {
                    if b & m == m {
                        self.amplitudes[b] *= ph;
                    }
                }
            }
            Gate::Swap { a, b } => {
                let ma = self.mask(*a);
                let mb = self.mask(*b);
                for idx in 0..dim {
                    if idx & ma != 0 && idx & mb == 0 {
                        self.amplitudes.swap(idx, idx ^ ma ^ mb);
                    }
                }
            }
            Gate::CDiag { controls, targets, phase_table } => {
                let cmask: usize = controls.iter().map(|&c| self.mask(c)).sum();
                let tmasks: Vec<usize> = targets.iter().map(|&t| self.mask(t)).collect();
                let phases: Vec<Complex64> =
                    phase_table.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
                for b in 0..dim {
                    if b & cmask == cmask {
                        let mut word = 0usize;
                        for &tm in &tmasks {
                            word = (word << 1) | usize::from(b & tm != 0);
                        }
                        self.amplitudes[b] *= phases[word];
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact outcome distribution over a measured qubit subset. The list
    /// must be strictly increasing, so the first listed qubit is the most
    /// significant bit of the outcome.
    pub fn marginal_probabilities(&self, measured: &[usize]) -> Result<Vec<f64>, SimulatorError> {
        if measured.is_empty()
            || measured.windows(2).any(|w| w[0] >= w[1])
            || *measured.last().unwrap() >= self.num_qubits
        {
            return Err(SimulatorError::BadMeasuredList);
        }
        let masks: Vec<usize> = measured.iter().map(|&q| self.mask(q)).collect();
        let mut probs = vec![0.0; 1 << measured.len()];
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut word = 0usize;
            for &m in &masks {
                word = (word << 1) | usize::from(b & m != 0);
            }
            probs[word] += p;
        }
        Ok(probs)
    }
}

/// Measurement statistics: outcome bit-string (most significant measured
/// qubit first) to occurrence count.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShotResult {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl ShotResult {
    /// Most frequent outcome as an integer; ties go to the smaller value.
    pub fn top_outcome(&self) -> Option<(u64, u64)> {
        let mut best: Option<(u64, u64)> = None;
        for (bits, &count) in &self.counts {
            let value = u64::from_str_radix(bits, 2).expect("counts keys are bit strings");
            match best {
                Some((_, c)) if count <= c => {}
                _ => best = Some((value, count)),
            }
        }
        best
    }
}

/// Simulates the circuit exactly, then samples `shots` outcomes of the
/// measured qubits; each reported bit is independently flipped with
/// probability `readout_flip`. Bit-identical for a fixed seed.
pub fn run(
    circuit: &Circuit,
    measured: &[usize],
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<ShotResult, SimulatorError> {
    if circuit.num_qubits() > MAX_QUBITS {
        return Err(SimulatorError::TooManyQubits {
            got: circuit.num_qubits(),
            max: MAX_QUBITS,
        });
    }
    if shots < 1 {
        return Err(SimulatorError::NoShots);
    }
    if !(0.0..=0.5).contains(&readout_flip) || readout_flip.is_nan() {
        return Err(SimulatorError::BadFlipProbability(readout_flip));
    }
    let mut state = StateVector::zero(circuit.num_qubits());
    for gate in circuit.gates() {
        state.apply(gate)?;
    }
    let probs = state.marginal_probabilities(measured)?;
    let width = measured.len();

    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let mut outcome = cdf.partition_point(|&c| c <= u);
        if outcome >= probs.len() {
            outcome = probs.len() - 1;
        }
        if readout_flip > 0.0 {
            for bit in 0..width {
                if rng.random::<f64>() < readout_flip {
                    outcome ^= 1 << (width - 1 - bit);
                }
            }
        }
        *counts.entry(format!("{outcome:0width$b}")).or_insert(0) += 1;
    }
    Ok(ShotResult { counts, shots })
}

/// Inverse quantum Fourier transform on `width` qubits starting at
/// `offset`: the SWAP reversal, then per qubit a CPHASE(−π/2^k) ladder
/// followed by H. Maps Σ_k e^{2πi·k·m/2^w}|k⟩/√2^w back to |m⟩.
pub fn inverse_qft(width: usize, offset: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for i in 0..width / 2 {
        gates.push(Gate::Swap { a: offset + i, b: offset + width - 1 - i });
    }
    for i in (0..width).rev() {
        for d in (1..width - i).rev() {
            gates.push(Gate::CPhase {
                control: offset + i + d,
                target: offset + i,
                theta: -PI / (1u64 << d) as f64,
            });
        }
        gates.push(Gate::H { qubit: offset + i });
    }
    gates
}
