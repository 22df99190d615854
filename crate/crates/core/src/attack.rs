//! Channel synthesis: when the condition holds, produce a concrete
//! simulating channel by minimizing a positive linear cost over the
//! feasible channels.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath::abs;
use crate::linalg::{self, Matrix};
use crate::lp::{self, LpError, LpProblem, LpStatus, FEASIBILITY_TOL};
use crate::pmf::{Channel, PmfError};
use crate::simulatability::LinearSystem;

#[derive(Debug, Clone, PartialEq)]
pub enum AttackError {
    /// The feasibility LP is infeasible; carries the Farkas dual over the
    /// stacked constraints.
    NotSimulatable {
        certificate: Vec<f64>,
    },
    DimensionMismatch {
        expected: usize,
        actual: usize,
    },
    /// Cost vectors must be strictly positive.
    NonPositiveCost {
        index: usize,
        value: f64,
    },
    /// The LP reported a status its construction rules out.
    UnexpectedLpStatus,
    Lp(LpError),
    Channel(PmfError),
}

impl fmt::Display for AttackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackError::NotSimulatable { .. } => {
                write!(f, "no simulating channel exists for this system")
            }
            AttackError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            AttackError::NonPositiveCost { index, value } => {
                write!(f, "cost entry {index} = {value} is not strictly positive")
            }
            AttackError::UnexpectedLpStatus => {
                write!(f, "internal LP returned an impossible status")
            }
            AttackError::Lp(e) => write!(f, "{e}"),
            AttackError::Channel(e) => write!(f, "{e}"),
        }
    }
}

impl From<LpError> for AttackError {
    fn from(e: LpError) -> Self {
        AttackError::Lp(e)
    }
}

/// A synthesis request: the stacked system plus a strictly positive cost
/// over the vectorized channel entries.
#[derive(Debug, Clone)]
pub struct AttackRequest<'a> {
    system: &'a LinearSystem,
    cost: Vec<f64>,
}

impl<'a> AttackRequest<'a> {
    /// All-ones cost. Row-stochasticity then fixes the objective, so any
    /// feasible channel is optimal and the solver's basic solution wins.
    pub fn new(system: &'a LinearSystem) -> Self {
        AttackRequest {
            cost: vec![1.0; system.n()],
            system,
        }
    }

    pub fn with_cost(system: &'a LinearSystem, cost: Vec<f64>) -> Result<Self, AttackError> {
        if cost.len() != system.n() {
            return Err(AttackError::DimensionMismatch {
                expected: system.n(),
                actual: cost.len(),
            });
        }
        for (index, &value) in cost.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(AttackError::NonPositiveCost { index, value });
            }
        }
        Ok(AttackRequest { system, cost })
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn system(&self) -> &LinearSystem {
        self.system
    }
}

/// Minimizes the cost over nonnegative solutions of the stacked system and
/// reshapes the minimizer into a `|Z| x |X|` channel.
///
/// The solution satisfies the stacked constraints within the LP tolerance,
/// which makes the returned channel row-stochastic and `A Q = C` accurate
/// to the same tolerance.
pub fn find_attack_channel(req: &AttackRequest<'_>) -> Result<Channel, AttackError> {
    let sys = req.system;
    let problem = LpProblem::new(req.cost.clone(), sys.a_big().clone(), sys.c_vec().to_vec())?;
    let outcome = lp::solve(&problem)?;
    match outcome.status {
        LpStatus::Optimal => {
            let q = outcome
                .solution
                .expect("optimal outcome carries a solution");
            let dims = sys.dims();
            let q_mat = linalg::reshape_t(&q, dims.z_size, dims.x_size)
                .expect("solution length is |Z||X| by construction");
            Channel::from_matrix(&q_mat, FEASIBILITY_TOL).map_err(AttackError::Channel)
        }
        LpStatus::Infeasible => Err(AttackError::NotSimulatable {
            certificate: outcome.certificate.unwrap_or_default(),
        }),
        // The cost is strictly positive over q >= 0, so the LP is bounded
        // below by zero.
        LpStatus::Unbounded => Err(AttackError::UnexpectedLpStatus),
    }
}

/// True iff `q` is row-stochastic within `tol` and `a * q` matches `c`
/// entrywise within `tol`.
pub fn validate_channel(
    a: &Matrix,
    c: &Matrix,
    q: &Channel,
    tol: f64,
) -> Result<bool, AttackError> {
    if a.cols() != q.rows() {
        return Err(AttackError::DimensionMismatch {
            expected: a.cols(),
            actual: q.rows(),
        });
    }
    if c.rows() != a.rows() || c.cols() != q.cols() {
        return Err(AttackError::DimensionMismatch {
            expected: a.rows() * q.cols(),
            actual: c.rows() * c.cols(),
        });
    }
    if q.validate(tol).is_err() {
        return Ok(false);
    }
    let product = a.matmul(&q.as_matrix());
    let mut worst = 0.0_f64;
    for i in 0..c.rows() {
        for j in 0..c.cols() {
            let d = abs(product[(i, j)] - c[(i, j)]);
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst <= tol)
}
