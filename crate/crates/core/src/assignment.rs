//! Exact rectangular assignment.
//!
//! `solve_full_assignment` is the shortest-augmenting-path Hungarian method
//! (O(m²n)) over real costs. `solve_partial_assignment` lets every row and
//! column stay unassigned at a fixed penalty; it is reduced to a square full
//! assignment by appending one private dummy column per row and one private
//! dummy row per column. `brute_force_assignment` enumerates every partial
//! matching and is the reference used by the tests.

use crate::error::{Error, Result};

/// Largest side accepted by [`brute_force_assignment`].
pub const BRUTE_FORCE_MAX_SIDE: usize = 8;

const TIE_TOLERANCE: f64 = 1e-12;

/// Dense `rows × cols` matrix of finite, nonnegative costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major `data`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        for (k, &value) in data.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCost {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                    value,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. An empty slice gives a 0×0 matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// A one-to-one set of `(row, col)` pairs and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    /// Pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// For full assignment, the sum of the selected entries. For partial
    /// assignment this also includes the penalty of every unassigned row
    /// and column.
    pub total_cost: f64,
}

/// Minimum-cost assignment of every row to a distinct column (`rows <= cols`).
pub fn solve_full_assignment(costs: &CostMatrix) -> Result<AssignmentResult> {
    if costs.rows > costs.cols {
        return Err(Error::TooManyRows {
            rows: costs.rows,
            cols: costs.cols,
        });
    }
    let col_of_row = hungarian(costs.rows, costs.cols, |i, j| costs.get(i, j));
    let pairs: Vec<(usize, usize)> = col_of_row.into_iter().enumerate().collect();
    let total_cost = pairs.iter().map(|&(i, j)| costs.get(i, j)).sum();
    Ok(AssignmentResult { pairs, total_cost })
}

/// Minimum of `Σ selected costs + penalty · (rows + cols − 2·|pairs|)`.
///
/// A pair whose cost equals `2 · penalty` is left unassigned.
pub fn solve_partial_assignment(costs: &CostMatrix, unassigned_penalty: f64) -> Result<AssignmentResult> {
    check_penalty(unassigned_penalty)?;
    let (m, n) = (costs.rows, costs.cols);
    let size = m + n;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < m, j < n) {
            (true, true) => costs.get(i, j),
            // dummy column `j - n` belongs to row `j - n`
            (true, false) => {
                if j - n == i {
                    unassigned_penalty
                } else {
                    f64::INFINITY
                }
            }
            // dummy row `i - m` belongs to column `i - m`
            (false, true) => {
                if i - m == j {
                    unassigned_penalty
                } else {
                    f64::INFINITY
                }
            }
            (false, false) => 0.0,
        }
    };
    let col_of_row = hungarian(size, size, cost);
    let threshold = 2.0 * unassigned_penalty;
    let pairs: Vec<(usize, usize)> = col_of_row
        .into_iter()
        .take(m)
        .enumerate()
        .filter(|&(i, j)| j < n && costs.get(i, j) < threshold)
        .collect();
    Ok(partial_result(costs, unassigned_penalty, pairs))
}

/// Exhaustive counterpart of [`solve_partial_assignment`].
///
/// Ties are broken toward fewer pairs, then toward the lexicographically
/// smallest pair list.
pub fn brute_force_assignment(costs: &CostMatrix, unassigned_penalty: f64) -> Result<AssignmentResult> {
    check_penalty(unassigned_penalty)?;
    let side = costs.rows.max(costs.cols);
    if side > BRUTE_FORCE_MAX_SIDE {
        return Err(Error::SizeCap {
            size: side,
            cap: BRUTE_FORCE_MAX_SIDE,
            hint: "use solve_partial_assignment",
        });
    }
    let mut search = BruteForce {
        costs,
        penalty: unassigned_penalty,
        used: vec![false; costs.cols],
        current: Vec::with_capacity(costs.rows),
        best: None,
    };
    search.visit(0);
    let best = search.best.expect("the empty matching is always a candidate");
    Ok(partial_result(costs, unassigned_penalty, best.pairs))
}

fn check_penalty(penalty: f64) -> Result<()> {
    if penalty.is_finite() && penalty >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "unassigned_penalty",
            value: penalty,
            reason: "must be finite and nonnegative",
        })
    }
}

fn partial_result(costs: &CostMatrix, penalty: f64, pairs: Vec<(usize, usize)>) -> AssignmentResult {
    let assigned: f64 = pairs.iter().map(|&(i, j)| costs.get(i, j)).sum();
    let unassigned = costs.rows + costs.cols - 2 * pairs.len();
    AssignmentResult {
        total_cost: assigned + penalty * unassigned as f64,
        pairs,
    }
}

struct BruteForce<'a> {
    costs: &'a CostMatrix,
    penalty: f64,
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: Option<AssignmentResult>,
}

impl BruteForce<'_> {
    fn visit(&mut self, row: usize) {
        if row == self.costs.rows {
            let candidate = partial_result(self.costs, self.penalty, self.current.clone());
            if self.improves(&candidate) {
                self.best = Some(candidate);
            }
            return;
        }
        self.visit(row + 1);
        for col in 0..self.costs.cols {
            if self.used[col] {
                continue;
            }
            self.used[col] = true;
            self.current.push((row, col));
            self.visit(row + 1);
            self.current.pop();
            self.used[col] = false;
        }
    }

    fn improves(&self, candidate: &AssignmentResult) -> bool {
        let Some(best) = &self.best else {
            return true;
        };
        let scale = best.total_cost.abs().max(1.0);
        let diff = candidate.total_cost - best.total_cost;
        if diff < -TIE_TOLERANCE * scale {
            return true;
        }
        if diff > TIE_TOLERANCE * scale {
            return false;
        }
        (candidate.pairs.len(), &candidate.pairs) < (best.pairs.len(), &best.pairs)
    }
}

/// Shortest augmenting path Hungarian method for `rows <= cols`.
///
/// Returns the column assigned to each row. `cost` may return `+∞` for
/// forbidden entries as long as a finite perfect matching of the rows exists.
fn hungarian(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    debug_assert!(rows <= cols);
    if rows == 0 {
        return Vec::new();
    }
    // 1-based potentials; index 0 is the virtual root column.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut row_of_col = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut min_slack = vec![f64::INFINITY; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        min_slack.fill(f64::INFINITY);
        used.fill(false);

        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            debug_assert!(delta.is_finite(), "no finite augmenting path");
            for j in 0..=cols {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; rows];
    for j in 1..=cols {
        if row_of_col[j] > 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}
