//! Standard-form linear programming: `min c'x  s.t.  Bx = d, x >= 0`.
//!
//! A dense two-phase simplex with Bland's pivot rule. Infeasibility and
//! unboundedness come back with checkable certificates: a dual vector `y`
//! with `y'B <= 0`, `y'd > 0` for infeasible problems, and a ray `r >= 0`
//! with `Br = 0`, `c'r < 0` for unbounded ones.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath::abs;
use crate::linalg::Matrix;

/// Absolute feasibility tolerance on constraint residuals and sign bounds.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Entries smaller than this cannot serve as pivots, and reduced costs
/// above `-PIVOT_TOL` do not qualify a column for entering.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    DimensionMismatch {
        expected: usize,
        actual: usize,
    },
    NonFiniteData,
    /// The pivot cap was exhausted. Bland's rule precludes cycling, so this
    /// signals a solver defect rather than a property of the problem.
    CycleLimitExceeded {
        iterations: usize,
    },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, actual } => {
                write!(
                    f,
                    "LP dimension mismatch: expected {expected}, got {actual}"
                )
            }
            LpError::NonFiniteData => write!(f, "LP data contains NaN or infinite entries"),
            LpError::CycleLimitExceeded { iterations } => {
                write!(f, "simplex exceeded its pivot cap of {iterations}")
            }
        }
    }
}

/// `min cost'x  s.t.  constraints * x = rhs, x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    cost: Vec<f64>,
    constraints: Matrix,
    rhs: Vec<f64>,
}

impl LpProblem {
    pub fn new(cost: Vec<f64>, constraints: Matrix, rhs: Vec<f64>) -> Result<Self, LpError> {
        if constraints.cols() != cost.len() {
            return Err(LpError::DimensionMismatch {
                expected: constraints.cols(),
                actual: cost.len(),
            });
        }
        if constraints.rows() != rhs.len() {
            return Err(LpError::DimensionMismatch {
                expected: constraints.rows(),
                actual: rhs.len(),
            });
        }
        let finite =
            cost.iter().chain(rhs.iter()).all(|v| v.is_finite()) && constraints.is_finite();
        if !finite {
            return Err(LpError::NonFiniteData);
        }
        Ok(LpProblem {
            cost,
            constraints,
            rhs,
        })
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn constraints(&self) -> &Matrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Present iff `Optimal`.
    pub solution: Option<Vec<f64>>,
    /// Present iff `Optimal`.
    pub objective: Option<f64>,
    /// Farkas dual for `Infeasible`, improving ray for `Unbounded`.
    pub certificate: Option<Vec<f64>>,
    pub iterations: usize,
    /// True when the solve stopped at a feasible point whose objective had
    /// already crossed the requested bound; the point need not be optimal.
    pub early_stopped: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Stop phase 2 as soon as a feasible basic solution with objective
    /// strictly below this bound appears.
    pub stop_when_below: Option<f64>,
}

/// Verifies an outcome against the problem data at [`FEASIBILITY_TOL`].
pub fn check_certificate(p: &LpProblem, o: &LpOutcome) -> bool {
    let tol = FEASIBILITY_TOL;
    match o.status {
        LpStatus::Optimal => {
            let x = match &o.solution {
                Some(x) if x.len() == p.num_vars() => x,
                _ => return false,
            };
            if x.iter().any(|&v| v < -tol) {
                return false;
            }
            let residual = p.constraints.matvec(x);
            residual
                .iter()
                .zip(p.rhs.iter())
                .all(|(lhs, rhs)| abs(lhs - rhs) <= tol)
        }
        LpStatus::Unbounded => {
            let ray = match &o.certificate {
                Some(r) if r.len() == p.num_vars() => r,
                _ => return false,
            };
            if ray.iter().any(|&v| v < -tol) {
                return false;
            }
            if p.constraints.matvec(ray).iter().any(|&v| abs(v) > tol) {
                return false;
            }
            dot(&p.cost, ray) <= -tol
        }
        LpStatus::Infeasible => {
            let y = match &o.certificate {
                Some(y) if y.len() == p.num_constraints() => y,
                _ => return false,
            };
            let yb = p.constraints.transpose().matvec(y);
            if yb.iter().any(|&v| v > tol) {
                return false;
            }
            dot(y, &p.rhs) >= tol
        }
    }
}

pub fn solve(p: &LpProblem) -> Result<LpOutcome, LpError> {
    solve_with(p, &SolveOptions::default())
}

pub fn solve_with(p: &LpProblem, opts: &SolveOptions) -> Result<LpOutcome, LpError> {
    Simplex::new(p).run(opts)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Dense tableau simplex. Rows hold `[columns | rhs]`; `obj` holds the
/// reduced costs and, in its last slot, minus the current objective value.
struct Simplex {
    m: usize,
    n: usize,
    total: usize,
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Per-row sign applied to make the right-hand side nonnegative.
    row_sign: Vec<f64>,
    cost: Vec<f64>,
    iterations: usize,
    cap: usize,
}

enum IterateEnd {
    Optimal,
    Unbounded { entering: usize },
    EarlyStop,
}

impl Simplex {
    fn new(p: &LpProblem) -> Self {
        let m = p.num_constraints();
        let n = p.num_vars();
        let total = n + m;
        let mut rows = Vec::with_capacity(m);
        let mut row_sign = vec![1.0; m];
        for i in 0..m {
            let mut row = vec![0.0; total + 1];
            let sign = if p.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            row_sign[i] = sign;
            for (j, slot) in row.iter_mut().enumerate().take(n) {
                *slot = sign * p.constraints[(i, j)];
            }
            row[n + i] = 1.0;
            row[total] = sign * p.rhs[i];
            rows.push(row);
        }
        // Phase-1 objective: minimize the sum of artificials. With the
        // artificial basis, the reduced cost of column j is -sum of its
        // entries and the objective value is the sum of the rhs.
        let mut obj = vec![0.0; total + 1];
        for j in 0..n {
            obj[j] = -(0..m).map(|i| rows[i][j]).sum::<f64>();
        }
        obj[total] = -(0..m).map(|i| rows[i][total]).sum::<f64>();
        Simplex {
            m,
            n,
            total,
            rows,
            obj,
            basis: (n..n + m).collect(),
            row_sign,
            cost: p.cost.clone(),
            iterations: 0,
            cap: 50 * (m + n),
        }
    }

    fn run(mut self, opts: &SolveOptions) -> Result<LpOutcome, LpError> {
        // Phase 1 minimizes the artificial mass; it is bounded below by
        // zero, so it always ends at an optimum.
        match self.iterate(self.total, None)? {
            IterateEnd::Optimal => {}
            IterateEnd::Unbounded { .. } | IterateEnd::EarlyStop => unreachable!(),
        }
        let infeasibility = -self.obj[self.total];
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                solution: None,
                objective: None,
                certificate: Some(self.farkas_dual()),
                iterations: self.iterations,
                early_stopped: false,
            });
        }

        self.purge_artificials();
        self.load_phase2_objective();

        match self.iterate(self.n, opts.stop_when_below)? {
            IterateEnd::Optimal => {
                let x = self.extract_solution();
                let objective = dot(&self.cost, &x);
                Ok(LpOutcome {
                    status: LpStatus::Optimal,
                    solution: Some(x),
                    objective: Some(objective),
                    certificate: None,
                    iterations: self.iterations,
                    early_stopped: false,
                })
            }
            IterateEnd::EarlyStop => {
                let x = self.extract_solution();
                let objective = dot(&self.cost, &x);
                Ok(LpOutcome {
                    status: LpStatus::Optimal,
                    solution: Some(x),
                    objective: Some(objective),
                    certificate: None,
                    iterations: self.iterations,
                    early_stopped: true,
                })
            }
            IterateEnd::Unbounded { entering } => {
                let ray = self.improving_ray(entering);
                Ok(LpOutcome {
                    status: LpStatus::Unbounded,
                    solution: None,
                    objective: None,
                    certificate: Some(ray),
                    iterations: self.iterations,
                    early_stopped: false,
                })
            }
        }
    }

    /// Bland iteration over the first `active_cols` columns.
    fn iterate(
        &mut self,
        active_cols: usize,
        stop_below: Option<f64>,
    ) -> Result<IterateEnd, LpError> {
        loop {
            if let Some(bound) = stop_below {
                if -self.obj[self.total] < bound {
                    return Ok(IterateEnd::EarlyStop);
                }
            }
            // Entering: lowest-index column with a negative reduced cost.
            let mut outcome = IterateEnd::Optimal;
            let mut pivoted = false;
            for j in 0..active_cols {
                if self.obj[j] >= -PIVOT_TOL {
                    continue;
                }
                match self.leaving_row(j) {
                    Some(row) => {
                        self.pivot(row, j);
                        self.iterations += 1;
                        if self.iterations > self.cap {
                            return Err(LpError::CycleLimitExceeded {
                                iterations: self.cap,
                            });
                        }
                        pivoted = true;
                    }
                    None => {
                        // No positive entry: in phase 2 this column carries
                        // an improving ray. During phase 1 the objective is
                        // bounded, so such a column is numerically dead and
                        // the scan moves on.
                        if active_cols == self.n {
                            outcome = IterateEnd::Unbounded { entering: j };
                        } else {
                            continue;
                        }
                    }
                }
                break;
            }
            if pivoted {
                continue;
            }
            return Ok(outcome);
        }
    }

    /// Minimum-ratio row for column `j`, ties broken by the smallest basis
    /// variable index.
    fn leaving_row(&self, j: usize) -> Option<usize> {
        let rhs_col = self.total;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][j];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rows[i][rhs_col] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12
                        || (abs(ratio - br) <= 1e-12 && self.basis[i] < self.basis[bi])
                    {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.total + 1;
        let pivot_val = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= pivot_val;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..width {
                let delta = factor * self.rows[row][k];
                self.rows[i][k] -= delta;
            }
            self.rows[i][col] = 0.0;
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for k in 0..width {
                self.obj[k] -= factor * self.rows[row][k];
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Dual vector certifying phase-1 infeasibility, mapped back through
    /// the row sign flips: at the phase-1 optimum the multiplier of row i
    /// is one minus the reduced cost of its artificial column. Only valid
    /// before any rows are dropped.
    fn farkas_dual(&self) -> Vec<f64> {
        debug_assert_eq!(self.rows.len(), self.m);
        let mut y = vec![0.0; self.m];
        for (row, value) in y.iter_mut().enumerate() {
            let multiplier = 1.0 - self.obj[self.n + row];
            *value = self.row_sign[row] * multiplier;
        }
        y
    }

    /// Drives artificial variables out of the basis; rows that cannot be
    /// pivoted on any structural column are redundant and get dropped.
    fn purge_artificials(&mut self) {
        let mut row = 0;
        while row < self.rows.len() {
            if self.basis[row] < self.n {
                row += 1;
                continue;
            }
            let pivot_col = (0..self.n)
                .max_by(|&a, &b| {
                    abs(self.rows[row][a])
                        .partial_cmp(&abs(self.rows[row][b]))
                        .unwrap()
                })
                .filter(|&j| abs(self.rows[row][j]) > PIVOT_TOL);
            match pivot_col {
                Some(j) => {
                    self.pivot(row, j);
                    row += 1;
                }
                None => {
                    self.rows.remove(row);
                    self.basis.remove(row);
                }
            }
        }
        // Artificial columns are dead from here on; blank them so later
        // pivots cannot resurrect one.
        for r in self.rows.iter_mut() {
            for slot in &mut r[self.n..self.total] {
                *slot = 0.0;
            }
        }
    }

    fn load_phase2_objective(&mut self) {
        let mut obj = vec![0.0; self.total + 1];
        obj[..self.n].copy_from_slice(&self.cost);
        let mut z = 0.0;
        for (row, &b) in self.basis.iter().enumerate() {
            let cb = self.cost[b];
            if cb == 0.0 {
                continue;
            }
            for (slot, entry) in obj.iter_mut().zip(self.rows[row].iter()).take(self.n) {
                *slot -= cb * entry;
            }
            z += cb * self.rows[row][self.total];
        }
        obj[self.total] = -z;
        self.obj = obj;
    }

    fn extract_solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (row, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rows[row][self.total];
            }
        }
        x
    }

    /// Ray read off an entering column with no eligible pivot, scaled so
    /// its largest component is 1.
    fn improving_ray(&self, entering: usize) -> Vec<f64> {
        let mut ray = vec![0.0; self.n];
        ray[entering] = 1.0;
        for (row, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                ray[b] = -self.rows[row][entering];
            }
        }
        let peak = ray
            .iter()
            .fold(0.0_f64, |acc, &v| if v > acc { v } else { acc });
        if peak > 0.0 {
            for v in ray.iter_mut() {
                *v /= peak;
            }
        }
        ray
    }
}
