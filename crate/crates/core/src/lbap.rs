//! Linear bottleneck assignment and the reduction of a per-FRB linear feasibility
//! system over permutations to a single bottleneck assignment.
//!
//! The solver is the classical threshold method: binary search over the sorted
//! distinct costs, testing at each threshold whether the bipartite graph of
//! admissible (row, column) pairs has a perfect matching (Hopcroft–Karp).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::LbapError;

/// Square cost matrix, `c[row][col]`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CostMatrix {
    size: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(size: usize, data: Vec<f64>) -> Result<Self, LbapError> {
        if size == 0 || data.len() != size * size {
            return Err(LbapError::NotSquare { rows: size, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LbapError::NonFinite { row: pos / size, col: pos % size });
        }
        Ok(Self { size, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LbapError> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(LbapError::NotSquare { rows: size, len: rows.iter().map(Vec::len).sum() });
        }
        Self::new(size, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, LbapError> {
        Self::new(size, (0..size * size).map(|i| f(i / size, i % size)).collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.size).map(<[f64]>::to_vec).collect()
    }

    /// Whitespace-separated rows, one per line.
    pub fn to_text(&self) -> String {
        self.data
            .chunks(self.size)
            .map(|r| r.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn parse_text(text: &str) -> Result<Self, LbapError> {
        let rows: Result<Vec<Vec<f64>>, _> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(str::parse::<f64>).collect())
            .collect();
        let rows = rows.map_err(|e| LbapError::Shape(format!("unparseable entry: {e}")))?;
        Self::from_rows(rows)
    }
}

impl TryFrom<Vec<Vec<f64>>> for CostMatrix {
    type Error = LbapError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

impl From<CostMatrix> for Vec<Vec<f64>> {
    fn from(c: CostMatrix) -> Self {
        c.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult {
    /// `perm[col]` is the row assigned to column `col`.
    pub perm: Vec<usize>,
    /// `max_col c[perm[col]][col]`.
    pub bottleneck: f64,
}

/// Hopcroft–Karp over the rows → columns graph given by adjacency lists.
/// Returns `match_col[col] = Some(row)` for a maximum matching.
struct Matcher<'a> {
    adj: &'a [Vec<usize>],
    match_row: Vec<Option<usize>>,
    match_col: Vec<Option<usize>>,
    dist: Vec<u32>,
}

const UNREACHED: u32 = u32::MAX;

impl<'a> Matcher<'a> {
    fn new(adj: &'a [Vec<usize>], cols: usize) -> Self {
        Self { adj, match_row: vec![None; adj.len()], match_col: vec![None; cols], dist: vec![UNREACHED; adj.len()] }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for r in 0..self.adj.len() {
            if self.match_row[r].is_none() {
                self.dist[r] = 0;
                queue.push_back(r);
            } else {
                self.dist[r] = UNREACHED;
            }
        }
        let mut found = false;
        while let Some(r) = queue.pop_front() {
            for &c in &self.adj[r] {
                match self.match_col[c] {
                    None => found = true,
                    Some(r2) if self.dist[r2] == UNREACHED => {
                        self.dist[r2] = self.dist[r] + 1;
                        queue.push_back(r2);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, r: usize) -> bool {
        for idx in 0..self.adj[r].len() {
            let c = self.adj[r][idx];
            let ok = match self.match_col[c] {
                None => true,
                Some(r2) => self.dist[r2] == self.dist[r] + 1 && self.dfs(r2),
            };
            if ok {
                self.match_row[r] = Some(c);
                self.match_col[c] = Some(r);
                return true;
            }
        }
        self.dist[r] = UNREACHED;
        false
    }

    fn run(mut self) -> (usize, Vec<Option<usize>>) {
        let mut size = 0;
        while self.bfs() {
            for r in 0..self.adj.len() {
                if self.match_row[r].is_none() && self.dfs(r) {
                    size += 1;
                }
            }
        }
        (size, self.match_col)
    }
}

/// Perfect matching of the graph `{(r, c) : c[r][c] <= threshold}`, if one exists.
pub fn perfect_matching_at(c: &CostMatrix, threshold: f64) -> Option<Vec<usize>> {
    let n = c.size();
    let adj: Vec<Vec<usize>> = (0..n).map(|r| (0..n).filter(|&col| c.get(r, col) <= threshold).collect()).collect();
    if adj.iter().any(Vec::is_empty) {
        return None;
    }
    let (size, match_col) = Matcher::new(&adj, n).run();
    (size == n).then(|| match_col.into_iter().map(|r| r.expect("perfect matching")).collect())
}

/// Globally optimal bottleneck assignment.
pub fn solve_lbap(c: &CostMatrix) -> AssignmentResult {
    let n = c.size();
    let mut values = c.data.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();

    // Every row and every column must use one entry, so the bottleneck is at least
    // the largest row minimum and the largest column minimum.
    let row_floor = (0..n).map(|r| (0..n).map(|col| c.get(r, col)).fold(f64::INFINITY, f64::min));
    let col_floor = (0..n).map(|col| (0..n).map(|r| c.get(r, col)).fold(f64::INFINITY, f64::min));
    let floor = row_floor.chain(col_floor).fold(f64::NEG_INFINITY, f64::max);

    let mut lo = values.partition_point(|&v| v < floor);
    let mut hi = values.len() - 1;
    let mut witness = None;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match perfect_matching_at(c, values[mid]) {
            Some(p) => {
                hi = mid;
                witness = Some(p);
            }
            None => lo = mid + 1,
        }
    }
    let perm = match witness {
        Some(p) if p.iter().enumerate().all(|(col, &r)| c.get(r, col) <= values[lo]) => p,
        _ => perfect_matching_at(c, values[lo]).expect("largest threshold admits every edge"),
    };
    let bottleneck = perm.iter().enumerate().map(|(col, &r)| c.get(r, col)).fold(f64::NEG_INFINITY, f64::max);
    AssignmentResult { perm, bottleneck }
}

/// Coefficients of the per-FRB linear system
/// `a[n][perm[l]][l] <= b[n][l]` for every constraint family `n` and FRB `l`,
/// together with the positive shift `M` used to turn it into a bottleneck problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCoefficients {
    pub size: usize,
    pub families: usize,
    /// `a[(n * K + k) * K + l]`.
    pub a_hat: Vec<f64>,
    /// `b[n * K + l]`.
    pub b_hat: Vec<f64>,
    pub shift: f64,
}

/// Padding added on top of the smallest admissible shift, relative to the
/// coefficient magnitude.
pub const SHIFT_PAD: f64 = 1e-6;

/// Absolute slack on the `bottleneck <= 1` test, absorbing rounding in the ratios.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

impl FeasibilityCoefficients {
    pub fn new(size: usize, families: usize, a_hat: Vec<f64>, b_hat: Vec<f64>, shift: f64) -> Result<Self, LbapError> {
        if size == 0 || families == 0 {
            return Err(LbapError::Shape("need at least one user and one constraint family".into()));
        }
        if a_hat.len() != families * size * size {
            return Err(LbapError::Shape(format!("a_hat has {} entries, expected {}", a_hat.len(), families * size * size)));
        }
        if b_hat.len() != families * size {
            return Err(LbapError::Shape(format!("b_hat has {} entries, expected {}", b_hat.len(), families * size)));
        }
        Ok(Self { size, families, a_hat, b_hat, shift })
    }

    /// Same as [`new`](Self::new) with the shift chosen by [`default_shift`].
    pub fn with_default_shift(size: usize, families: usize, a_hat: Vec<f64>, b_hat: Vec<f64>) -> Result<Self, LbapError> {
        let shift = default_shift(&a_hat, &b_hat);
        Self::new(size, families, a_hat, b_hat, shift)
    }

    #[inline]
    pub fn a(&self, n: usize, k: usize, l: usize) -> f64 {
        self.a_hat[(n * self.size + k) * self.size + l]
    }

    #[inline]
    pub fn b(&self, n: usize, l: usize) -> f64 {
        self.b_hat[n * self.size + l]
    }

    /// Divides every constraint `(n, l)` by the largest magnitude among its
    /// coefficients and resets the shift. The feasible set is unchanged, and all
    /// constraints then carry the same relative precision after shifting.
    pub fn normalized(mut self) -> Self {
        let k = self.size;
        for n in 0..self.families {
            for l in 0..k {
                let scale = (0..k).map(|c| self.a(n, c, l).abs()).fold(self.b(n, l).abs(), f64::max);
                if scale > 0.0 {
                    for c in 0..k {
                        self.a_hat[(n * k + c) * k + l] /= scale;
                    }
                    self.b_hat[n * k + l] /= scale;
                }
            }
        }
        self.shift = default_shift(&self.a_hat, &self.b_hat);
        self
    }

    pub fn min_coefficient(&self) -> f64 {
        self.a_hat.iter().chain(&self.b_hat).copied().fold(f64::INFINITY, f64::min)
    }

    /// Direct check of every constraint for the assignment `perm[l] = k`.
    pub fn satisfied_by(&self, perm: &[usize]) -> bool {
        (0..self.families).all(|n| perm.iter().enumerate().all(|(l, &k)| self.a(n, k, l) <= self.b(n, l)))
    }
}

/// Smallest comfortable shift: `M = s (1 + pad) + max(0, -min)` where `s` is the
/// largest coefficient magnitude (1 if all are zero). Scaling with `s` keeps the
/// ratios away from 1 by an amount proportional to the constraint violations, so
/// the fixed slack in [`check_feasibility`] stays relative.
pub fn default_shift(a_hat: &[f64], b_hat: &[f64]) -> f64 {
    let scale = a_hat.iter().chain(b_hat).fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let min = a_hat.iter().chain(b_hat).copied().fold(f64::INFINITY, f64::min);
    scale * (1.0 + SHIFT_PAD) + (-min).max(0.0)
}

/// `c[k][l] = max_n (M + a[n][k][l]) / (M + b[n][l])`.
pub fn build_feasibility_lbap(coeffs: &FeasibilityCoefficients) -> Result<CostMatrix, LbapError> {
    let min = coeffs.min_coefficient();
    if (coeffs.shift + min).is_nan() || coeffs.shift + min <= 0.0 {
        return Err(LbapError::InvalidShift { shift: coeffs.shift, min });
    }
    let m = coeffs.shift;
    let k = coeffs.size;
    CostMatrix::from_fn(k, |row, col| {
        (0..coeffs.families).map(|n| (m + coeffs.a(n, row, col)) / (m + coeffs.b(n, col))).fold(f64::NEG_INFINITY, f64::max)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// `witness[l] = k` when feasible.
    pub witness: Option<Vec<usize>>,
    pub bottleneck: f64,
}

pub fn check_feasibility(coeffs: &FeasibilityCoefficients) -> Result<FeasibilityVerdict, LbapError> {
    let costs = build_feasibility_lbap(coeffs)?;
    let AssignmentResult { perm, bottleneck } = solve_lbap(&costs);
    let feasible = bottleneck <= 1.0 + FEASIBILITY_SLACK;
    Ok(FeasibilityVerdict { feasible, witness: feasible.then_some(perm), bottleneck })
}
