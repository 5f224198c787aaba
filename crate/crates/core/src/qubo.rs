//! QUBO form of the TSP over n² position variables, plus the decode back
//! to a tour. Variable `x[v*n + p]` means "city v sits at tour position p".

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{CostMatrix, Tour};

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("coefficient index ({i},{j}) out of range for {num_vars} variables")]
    BadIndex { i: u32, j: u32, num_vars: u32 },
    #[error("assignment has {got} bits, problem has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("penalty must be positive, got {0}")]
    BadPenalty(f64),
}

/// Quadratic form over binary variables: `offset + Σ_{i≤j} coeff[i,j]·x_i·x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    num_vars: u32,
    coefficients: BTreeMap<(u32, u32), f64>,
    offset: f64,
}

impl QuboProblem {
    pub fn new(num_vars: u32) -> Self {
        Self { num_vars, coefficients: BTreeMap::new(), offset: 0.0 }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coefficients(&self) -> &BTreeMap<(u32, u32), f64> {
        &self.coefficients
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Accumulates `value` onto the (i,j) coefficient; the key is stored
    /// with i ≤ j.
    pub fn add_coefficient(&mut self, i: u32, j: u32, value: f64) -> Result<(), QuboError> {
        if i >= self.num_vars || j >= self.num_vars {
            return Err(QuboError::BadIndex { i, j, num_vars: self.num_vars });
        }
        let key = if i <= j { (i, j) } else { (j, i) };
        *self.coefficients.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    /// Exact polynomial evaluation on a binary assignment.
    pub fn energy(&self, x: &[bool]) -> Result<f64, QuboError> {
        if x.len() != self.num_vars as usize {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars as usize,
                got: x.len(),
            });
        }
        let mut e = self.offset;
        for (&(i, j), &w) in &self.coefficients {
            if x[i as usize] && x[j as usize] {
                e += w;
            }
        }
        Ok(e)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Position-variable index of city `v` at tour position `p`.
pub fn var_index(n: usize, city: usize, position: usize) -> u32 {
    (city * n + position) as u32
}

/// Penalty weight that makes any constraint violation cost more than any
/// tour: `n·max(c) + 1`.
pub fn default_penalty(m: &CostMatrix) -> f64 {
    m.n() as f64 * m.max_cost() + 1.0
}

/// Builds the TSP QUBO: one-city-per-position and one-position-per-city
/// penalties plus the directed edge costs between consecutive positions.
/// On any feasible assignment the energy equals the decoded tour's cost.
pub fn encode_tsp_qubo(m: &CostMatrix, penalty: f64) -> Result<QuboProblem, QuboError> {
    if !(penalty > 0.0) {
        return Err(QuboError::BadPenalty(penalty));
    }
    let n = m.n();
    let mut q = QuboProblem::new((n * n) as u32);

    // penalty * Σ_v (1 - Σ_p x_{v,p})², expanded with x² = x.
    for v in 0..n {
        q.add_offset(penalty);
        for p in 0..n {
            q.add_coefficient(var_index(n, v, p), var_index(n, v, p), -penalty)?;
            for p2 in p + 1..n {
                q.add_coefficient(var_index(n, v, p), var_index(n, v, p2), 2.0 * penalty)?;
            }
        }
    }
    // penalty * Σ_p (1 - Σ_v x_{v,p})²
    for p in 0..n {
        q.add_offset(penalty);
        for v in 0..n {
            q.add_coefficient(var_index(n, v, p), var_index(n, v, p), -penalty)?;
            for v2 in v + 1..n {
                q.add_coefficient(var_index(n, v, p), var_index(n, v2, p), 2.0 * penalty)?;
            }
        }
    }
    // Σ_{u≠v} c[u][v] · Σ_p x_{u,p} · x_{v,(p+1) mod n}
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let c = m.cost(u, v);
            if c == 0.0 {
                continue;
            }
            for p in 0..n {
                q.add_coefficient(var_index(n, u, p), var_index(n, v, (p + 1) % n), c)?;
            }
        }
    }
    Ok(q)
}

/// Reads a tour off a permutation-matrix assignment, depot-rotated and
/// canonicalized. Returns `None` when the assignment is not a permutation
/// matrix (infeasible is a value, not a failure).
pub fn decode_tour(m: &CostMatrix, x: &[bool]) -> Result<Option<Tour>, QuboError> {
    let n = m.n();
    if x.len() != n * n {
        return Err(QuboError::LengthMismatch { expected: n * n, got: x.len() });
    }
    let mut city_at = vec![usize::MAX; n];
    for v in 0..n {
        let mut row_count = 0;
        for p in 0..n {
            if x[v * n + p] {
                row_count += 1;
                if city_at[p] != usize::MAX {
                    return Ok(None); // two cities share a position
                }
                city_at[p] = v;
            }
        }
        if row_count != 1 {
            return Ok(None);
        }
    }
    if city_at.iter().any(|&c| c == usize::MAX) {
        return Ok(None);
    }
    let tour = Tour::from_cycle(&city_at).expect("permutation matrix decodes to a cycle");
    Ok(Some(tour.canonical(m.symmetric())))
}

/// Assignment for a tour: the inverse of [`decode_tour`] on feasible input.
pub fn encode_assignment(n: usize, tour: &Tour) -> Vec<bool> {
    let mut x = vec![false; n * n];
    for (p, &v) in tour.order().iter().enumerate() {
        x[v * n + p] = true;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bundled_instance, tour_cost};

    #[test]
    fn energy_of_empty_problem_is_offset() {
        let mut q = QuboProblem::new(3);
        q.add_offset(2.5);
        assert_eq!(q.energy(&[true, false, true]).unwrap(), 2.5);
    }

    #[test]
    fn energy_single_linear_term() {
        let mut q = QuboProblem::new(2);
        q.add_offset(1.0);
        q.add_coefficient(0, 0, 5.0).unwrap();
        assert_eq!(q.energy(&[true, true]).unwrap(), 6.0);
        assert_eq!(q.energy(&[false, true]).unwrap(), 1.0);
    }

    #[test]
    fn energy_matches_double_loop_oracle() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(1u32..10);
            let mut q = QuboProblem::new(n);
            q.add_offset(rng.random::<f64>() * 4.0 - 2.0);
            // dense random coefficients, stored sparsely
            let mut dense = vec![vec![0.0; n as usize]; n as usize];
            for i in 0..n {
                for j in i..n {
                    let w = rng.random::<f64>() * 2.0 - 1.0;
                    dense[i as usize][j as usize] = w;
                    q.add_coefficient(i, j, w).unwrap();
                }
            }
            let x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            let mut expected = q.offset();
            for i in 0..n as usize {
                for j in i..n as usize {
                    if x[i] && x[j] {
                        expected += dense[i][j];
                    }
                }
            }
            assert!((q.energy(&x).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_rejects_length_mismatch() {
        let q = QuboProblem::new(4);
        assert!(matches!(q.energy(&[true]), Err(QuboError::LengthMismatch { .. })));
    }

    #[test]
    fn coefficient_index_bounds() {
        let mut q = QuboProblem::new(2);
        assert!(matches!(q.add_coefficient(0, 2, 1.0), Err(QuboError::BadIndex { .. })));
    }

    #[test]
    fn feasible_assignment_energy_is_tour_cost() {
        let m = bundled_instance();
        let q = encode_tsp_qubo(&m, 100.0).unwrap();
        let t = Tour::new(vec![0, 2, 1, 3]).unwrap();
        let x = encode_assignment(4, &t);
        assert!((q.energy(&x).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn all_zero_assignment_pays_both_constraint_families() {
        let m = bundled_instance();
        let penalty = 100.0;
        let q = encode_tsp_qubo(&m, penalty).unwrap();
        let x = vec![false; 16];
        assert_eq!(q.energy(&x).unwrap(), 2.0 * 4.0 * penalty);
    }

    #[test]
    fn two_city_feasible_energy() {
        let m = crate::graph::parse_matrix("0 3\n4 0").unwrap();
        let q = encode_tsp_qubo(&m, 15.0).unwrap();
        // x_{0,0} = x_{1,1} = 1
        let x = vec![true, false, false, true];
        assert!((q.energy(&x).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn decode_identity_permutation() {
        let m = bundled_instance();
        let mut x = vec![false; 16];
        for i in 0..4 {
            x[i * 4 + i] = true;
        }
        let t = decode_tour(&m, &x).unwrap().unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn decode_all_zeros_is_infeasible() {
        let m = bundled_instance();
        assert!(decode_tour(&m, &vec![false; 16]).unwrap().is_none());
    }

    #[test]
    fn decode_rotates_depot_first() {
        let m = bundled_instance();
        // city order by position: 2, 1, 3, 0
        let mut x = vec![false; 16];
        for (p, v) in [2usize, 1, 3, 0].iter().enumerate() {
            x[v * 4 + p] = true;
        }
        let t = decode_tour(&m, &x).unwrap().unwrap();
        assert_eq!(t.order(), &[0, 2, 1, 3]);
    }

    #[test]
    fn decode_rejects_row_with_two_ones() {
        let m = bundled_instance();
        let mut x = vec![false; 16];
        x[0] = true;
        x[1] = true;
        assert!(decode_tour(&m, &x).unwrap().is_none());
    }

    // Exhaustive n=3 check: with penalty above n·max(c) every infeasible
    // assignment sits strictly above every feasible one, and feasible
    // energies equal tour costs.
    #[test]
    fn feasibility_energy_gap_n3_exhaustive() {
        let m = crate::graph::parse_matrix("0 4 7\n4 0 2\n7 2 0").unwrap();
        let penalty = default_penalty(&m);
        assert_eq!(penalty, 3.0 * 7.0 + 1.0);
        let q = encode_tsp_qubo(&m, penalty).unwrap();
        let mut max_feasible = f64::NEG_INFINITY;
        let mut min_infeasible = f64::INFINITY;
        for bits in 0u32..512 {
            let x: Vec<bool> = (0..9).map(|b| bits >> b & 1 == 1).collect();
            let e = q.energy(&x).unwrap();
            match decode_tour(&m, &x).unwrap() {
                Some(t) => {
                    let c = tour_cost(&m, &t).unwrap();
                    assert!((e - c).abs() < 1e-9, "feasible energy {e} != cost {c}");
                    max_feasible = max_feasible.max(e);
                }
                None => min_infeasible = min_infeasible.min(e),
            }
        }
        assert!(max_feasible < min_infeasible);
    }

    // All 24 permutation matrices for n=4 evaluate to their tour cost.
    #[test]
    fn qubo_equals_tour_cost_n4_all_permutations() {
        use itertools::Itertools;
        let m = bundled_instance();
        let q = encode_tsp_qubo(&m, default_penalty(&m)).unwrap();
        for perm in (0..4usize).permutations(4) {
            let mut x = vec![false; 16];
            for (p, &v) in perm.iter().enumerate() {
                x[v * 4 + p] = true;
            }
            let t = decode_tour(&m, &x).unwrap().unwrap();
            let c = tour_cost(&m, &t).unwrap();
            assert!((q.energy(&x).unwrap() - c).abs() < 1e-9);
        }
    }
}
