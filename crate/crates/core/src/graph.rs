//! TSP problem instances: cost matrices, tours, the tour-cost objective and
//! an exhaustive optimum used as ground truth by every solver path.

use std::fmt::Write as _;

use thiserror::Error;

/// Tolerance used when detecting symmetry and when comparing parsed values.
pub const SYMMETRY_EPS: f64 = 1e-9;

/// Largest city count accepted by [`brute_force_optimum`].
pub const BRUTE_FORCE_MAX_CITIES: usize = 12;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("matrix row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("could not parse entry {row},{col}: {token:?}")]
    BadNumber { row: usize, col: usize, token: String },
    #[error("negative cost {value} at {row},{col}")]
    NegativeCost { row: usize, col: usize, value: f64 },
    #[error("non-finite cost at {row},{col}")]
    NonFiniteCost { row: usize, col: usize },
    #[error("nonzero diagonal entry {value} at city {city}")]
    NonzeroDiagonal { city: usize, value: f64 },
    #[error("instance has {got} cities, need at least 2")]
    TooSmall { got: usize },
    #[error("empty matrix text")]
    Empty,
    #[error("tour visits {got} cities, matrix has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("order {order:?} is not a depot-rooted permutation")]
    BadTour { order: Vec<usize> },
    #[error("{got} cities exceeds the exhaustive-search cap of {max}")]
    TooManyCities { got: usize, max: usize },
}

/// Square matrix of non-negative travel costs; the problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<f64>,
    symmetric: bool,
}

impl CostMatrix {
    /// Validates and builds a matrix from rows. The symmetric flag is
    /// detected by element-wise comparison within [`SYMMETRY_EPS`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let n = rows.len();
        if n < 2 {
            return Err(GraphError::TooSmall { got: n });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::RaggedRow { row: i, expected: n, got: row.len() });
            }
        }
        let mut costs = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GraphError::NonFiniteCost { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(GraphError::NegativeCost { row: i, col: j, value: v });
                }
                if i == j && v != 0.0 {
                    return Err(GraphError::NonzeroDiagonal { city: i, value: v });
                }
                costs.push(v);
            }
        }
        let symmetric = (0..n).all(|i| {
            (i + 1..n).all(|j| (costs[i * n + j] - costs[j * n + i]).abs() <= SYMMETRY_EPS)
        });
        Ok(Self { n, costs, symmetric })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> f64 {
        self.costs[from * self.n + to]
    }

    /// Largest entry of the matrix.
    pub fn max_cost(&self) -> f64 {
        self.costs.iter().cloned().fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.costs[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

/// A depot-rooted Hamiltonian cycle: `order` is a permutation of
/// `{0,…,n−1}` with `order[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self, GraphError> {
        let n = order.len();
        let mut seen = vec![false; n];
        let valid = n >= 2
            && order[0] == 0
            && order.iter().all(|&c| {
                if c >= n || seen[c] {
                    false
                } else {
                    seen[c] = true;
                    true
                }
            });
        if !valid {
            return Err(GraphError::BadTour { order });
        }
        Ok(Self { order })
    }

    /// Rotates an arbitrary city sequence so the depot comes first, then
    /// validates it. For symmetric instances callers usually follow up with
    /// [`Tour::canonical`].
    pub fn from_cycle(cycle: &[usize]) -> Result<Self, GraphError> {
        let pos = cycle
            .iter()
            .position(|&c| c == 0)
            .ok_or_else(|| GraphError::BadTour { order: cycle.to_vec() })?;
        let mut order = Vec::with_capacity(cycle.len());
        order.extend_from_slice(&cycle[pos..]);
        order.extend_from_slice(&cycle[..pos]);
        Self::new(order)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Canonical form: depot first; on symmetric instances the traversal
    /// direction with the lexicographically smaller order wins.
    pub fn canonical(&self, symmetric: bool) -> Tour {
        if !symmetric {
            return self.clone();
        }
        let mut reversed = self.order.clone();
        reversed[1..].reverse();
        if reversed < self.order {
            Tour { order: reversed }
        } else {
            self.clone()
        }
    }
}

/// Total cost of a tour including the closing edge back to the depot.
pub fn tour_cost(m: &CostMatrix, t: &Tour) -> Result<f64, GraphError> {
    let n = m.n();
    if t.len() != n {
        return Err(GraphError::LengthMismatch { expected: n, got: t.len() });
    }
    let order = t.order();
    let mut total = 0.0;
    for i in 0..n {
        total += m.cost(order[i], order[(i + 1) % n]);
    }
    Ok(total)
}

/// Exhaustive minimum over all depot-rooted tours. Reversal duplicates are
/// skipped on symmetric instances; ties go to the lexicographically
/// smallest order.
pub fn brute_force_optimum(m: &CostMatrix) -> Result<(Tour, f64), GraphError> {
    let n = m.n();
    if n > BRUTE_FORCE_MAX_CITIES {
        return Err(GraphError::TooManyCities { got: n, max: BRUTE_FORCE_MAX_CITIES });
    }
    let mut best: Option<(Tour, f64)> = None;
    let mut rest: Vec<usize> = (1..n).collect();
    // Lexicographic enumeration, so the first strict minimum seen is also
    // the lexicographically smallest among equal-cost tours.
    loop {
        let skip = m.symmetric() && n > 2 && rest[0] > rest[n - 2];
        if !skip {
            let mut order = Vec::with_capacity(n);
            order.push(0);
            order.extend_from_slice(&rest);
            let tour = Tour { order };
            let cost = tour_cost(m, &tour)?;
            if best.as_ref().is_none_or(|(_, c)| cost < *c) {
                best = Some((tour, cost));
            }
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    Ok(best.expect("n >= 2 guarantees at least one tour"))
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

/// True iff `b` traverses the same cycle as `a`: a rotation of `a`, or a
/// rotation of `a`'s reversal when the instance is symmetric.
pub fn tours_equivalent(a: &Tour, b: &Tour, symmetric: bool) -> bool {
    orders_equivalent(a.order(), b.order(), symmetric)
}

/// Rotation/reversal equivalence on raw city sequences.
pub fn orders_equivalent(a: &[usize], b: &[usize], symmetric: bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    if n == 0 {
        return true;
    }
    let is_rotation = |x: &[usize]| -> bool {
        (0..n).any(|s| (0..n).all(|i| x[(s + i) % n] == b[i]))
    };
    if is_rotation(a) {
        return true;
    }
    if symmetric {
        let reversed: Vec<usize> = a.iter().rev().cloned().collect();
        return is_rotation(&reversed);
    }
    false
}

/// Parses the plain-text instance format: `n` lines of `n`
/// whitespace-separated decimal costs.
pub fn parse_matrix(text: &str) -> Result<CostMatrix, GraphError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(GraphError::Empty);
    }
    let n = lines.len();
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n {
            return Err(GraphError::RaggedRow { row: i, expected: n, got: tokens.len() });
        }
        let mut row = Vec::with_capacity(n);
        for (j, tok) in tokens.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| GraphError::BadNumber {
                row: i,
                col: j,
                token: tok.to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    CostMatrix::new(rows)
}

/// Serializes a matrix back to the text format: rows joined by single
/// spaces, one row per line, values rounded to 9 significant digits.
pub fn serialize_matrix(m: &CostMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.n() {
        for j in 0..m.n() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", round_sig(m.cost(i, j), 9));
        }
        out.push('\n');
    }
    out
}

fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (v * factor).round() / factor
}

/// Uniform-random symmetric instance with integer costs in `1..=max_cost`.
pub fn random_symmetric_matrix(n: usize, max_cost: u32, rng: &mut impl rand::RngExt) -> CostMatrix {
    assert!(n >= 2 && max_cost >= 1);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = rng.random_range(1..=max_cost) as f64;
            rows[i][j] = c;
            rows[j][i] = c;
        }
    }
    CostMatrix::new(rows).expect("generated matrix is valid")
}

/// The bundled 4-city instance used throughout the test suite and docs.
/// Its unique optimum is the cycle {0,3,1,2} at cost 10.
pub fn bundled_instance() -> CostMatrix {
    CostMatrix::new(vec![
        vec![0.0, 10.0, 4.0, 1.0],
        vec![10.0, 0.0, 3.0, 2.0],
        vec![4.0, 3.0, 0.0, 10.0],
        vec![1.0, 2.0, 10.0, 0.0],
    ])
    .expect("bundled instance is valid")
}
