//! Independent ground truth for the test suites.
//!
//! `feasibility_direct` answers the nonnegative-solvability question with a
//! plain phase-1 solve, never touching a g-inverse or the Farkas
//! construction, so it cross-checks the main pipeline. `grid_search_*`
//! brute-forces binary-output channels on a parameter grid. The random
//! generators build PMFs and systems with known verdicts.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::fmath::abs;
use crate::linalg::Matrix;
use crate::lp::{self, LpError, LpProblem, LpStatus};
use crate::pmf::{Channel, JointPmf};
use crate::simulatability::LinearSystem;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Grid search only covers binary X and at most six Z symbols.
    AlphabetTooLarge {
        x_size: usize,
        z_size: usize,
    },
    ResolutionTooSmall {
        resolution: usize,
    },
    Lp(LpError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::AlphabetTooLarge { x_size, z_size } => write!(
                f,
                "grid search needs |X| = 2 and |Z| <= 6, got |X| = {x_size}, |Z| = {z_size}"
            ),
            OracleError::ResolutionTooSmall { resolution } => {
                write!(f, "grid resolution must be at least 2, got {resolution}")
            }
            OracleError::Lp(e) => write!(f, "{e}"),
        }
    }
}

impl From<LpError> for OracleError {
    fn from(e: LpError) -> Self {
        OracleError::Lp(e)
    }
}

/// Nonnegative solvability of the stacked system, decided by a phase-1
/// solve alone (zero cost). True iff the artificial mass can be driven to
/// the feasibility tolerance.
pub fn feasibility_direct(sys: &LinearSystem) -> Result<bool, LpError> {
    let problem = LpProblem::new(
        vec![0.0; sys.n()],
        sys.a_big().clone(),
        sys.c_vec().to_vec(),
    )?;
    let outcome = lp::solve(&problem)?;
    Ok(outcome.status == LpStatus::Optimal)
}

/// Exhaustive scan over binary-output channels with each row probability
/// on the grid `{0, 1/res, ..., 1}`. Returns the channel minimizing
/// `max |A Q - C|` together with that residual.
pub fn grid_search_best(
    a: &Matrix,
    c: &Matrix,
    resolution: usize,
) -> Result<(Channel, f64), OracleError> {
    let z_size = a.cols();
    let x_size = c.cols();
    if x_size != 2 || z_size > 6 {
        return Err(OracleError::AlphabetTooLarge { x_size, z_size });
    }
    if resolution < 2 {
        return Err(OracleError::ResolutionTooSmall { resolution });
    }

    let y_size = a.rows();
    let mut theta = vec![0usize; z_size];
    let mut best_theta = theta.clone();
    let mut best_residual = f64::INFINITY;
    loop {
        // Residual of the channel whose row k is (theta_k, 1 - theta_k).
        let mut worst = 0.0_f64;
        for i in 0..y_size {
            let mut first = 0.0;
            let mut row_total = 0.0;
            for k in 0..z_size {
                let t = theta[k] as f64 / resolution as f64;
                first += a[(i, k)] * t;
                row_total += a[(i, k)];
            }
            let d0 = abs(first - c[(i, 0)]);
            let d1 = abs((row_total - first) - c[(i, 1)]);
            if d0 > worst {
                worst = d0;
            }
            if d1 > worst {
                worst = d1;
            }
        }
        if worst < best_residual {
            best_residual = worst;
            best_theta.copy_from_slice(&theta);
        }

        // Odometer step over the grid.
        let mut pos = 0;
        loop {
            if pos == z_size {
                let mut probs = Vec::with_capacity(z_size * 2);
                for &t in &best_theta {
                    let p = t as f64 / resolution as f64;
                    probs.push(p);
                    probs.push(1.0 - p);
                }
                let channel = Channel::new(z_size, 2, probs, 1e-12)
                    .expect("grid channels are stochastic by construction");
                return Ok((channel, best_residual));
            }
            if theta[pos] < resolution {
                theta[pos] += 1;
                break;
            }
            theta[pos] = 0;
            pos += 1;
        }
    }
}

/// [`grid_search_best`] filtered to approximate-feasibility evidence: the
/// minimizer is reported only when its residual is at most `1/resolution`.
pub fn grid_search_channel(
    a: &Matrix,
    c: &Matrix,
    resolution: usize,
) -> Result<Option<Channel>, OracleError> {
    let (channel, residual) = grid_search_best(a, c, resolution)?;
    if residual <= 1.0 / resolution as f64 {
        Ok(Some(channel))
    } else {
        Ok(None)
    }
}

/// PMF with entries drawn i.i.d. uniform and normalized.
pub fn random_pmf<R: Rng>(rng: &mut R, x_size: usize, y_size: usize, z_size: usize) -> JointPmf {
    let len = x_size * y_size * z_size;
    let mut probs: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    JointPmf::new(x_size, y_size, z_size, probs).expect("normalized table is a valid PMF")
}

/// Random row-stochastic matrix.
pub fn random_stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        let mut total = 0.0;
        let row: Vec<f64> = (0..cols).map(|_| rng.gen::<f64>() + 1e-6).collect();
        for &v in &row {
            total += v;
        }
        for j in 0..cols {
            m[(i, j)] = row[j] / total;
        }
    }
    m
}

/// Marginal pair `(A, C)` with `C = A * Q` for a random stochastic `Q`, so
/// the simulatability condition holds by construction.
pub fn random_simulatable_pair<R: Rng>(
    rng: &mut R,
    x_size: usize,
    y_size: usize,
    z_size: usize,
) -> (Matrix, Matrix) {
    let mut a = Matrix::zeros(y_size, z_size);
    let mut total = 0.0;
    for i in 0..y_size {
        for k in 0..z_size {
            let v = rng.gen::<f64>();
            a[(i, k)] = v;
            total += v;
        }
    }
    for i in 0..y_size {
        for k in 0..z_size {
            a[(i, k)] /= total;
        }
    }
    let q = random_stochastic(rng, z_size, x_size);
    let c = a.matmul(&q);
    (a, c)
}

/// Full joint PMF in which X is generated from Z through a planted
/// channel, so the verdict is known to be positive and the planted channel
/// itself is a witness.
pub fn random_pmf_with_planted_channel<R: Rng>(
    rng: &mut R,
    x_size: usize,
    y_size: usize,
    z_size: usize,
) -> (JointPmf, Matrix) {
    let yz = random_pmf(rng, 1, y_size, z_size);
    let q = random_stochastic(rng, z_size, x_size);
    let pmf = JointPmf::from_fn(x_size, y_size, z_size, |x, y, z| {
        yz.prob(0, y, z) * q[(z, x)]
    })
    .expect("product of a PMF and a channel is a PMF");
    (pmf, q)
}

/// Random feasible points of `a_big q = c, q >= 0`.
///
/// Vertices are collected by minimizing a handful of random strictly
/// positive costs; the rest of the sample is random convex combinations of
/// those vertices. Returns an empty vector when the system is infeasible.
pub fn sample_feasible_points<R: Rng>(
    sys: &LinearSystem,
    vertex_solves: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, LpError> {
    let n = sys.n();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for _ in 0..vertex_solves.max(1) {
        let cost: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
        let problem = LpProblem::new(cost, sys.a_big().clone(), sys.c_vec().to_vec())?;
        let outcome = lp::solve(&problem)?;
        match outcome.status {
            LpStatus::Optimal => vertices.push(outcome.solution.expect("optimal has solution")),
            LpStatus::Infeasible => return Ok(Vec::new()),
            LpStatus::Unbounded => unreachable!("positive cost over a bounded feasible set"),
        }
    }

    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let mut weights: Vec<f64> = (0..vertices.len()).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let mut point = vec![0.0; n];
        for (vertex, &w) in vertices.iter().zip(weights.iter()) {
            for (p, &v) in point.iter_mut().zip(vertex.iter()) {
                *p += w * v;
            }
        }
        points.push(point);
    }
    Ok(points)
}
