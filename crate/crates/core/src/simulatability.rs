//! The simulatability decision pipeline.
//!
//! For marginals `A = P_YZ` and `C = P_YX`, a simulating channel is a
//! row-stochastic `Q` with `A Q = C`. Stacking the matrix equation with the
//! row-sum constraints gives one linear system `A_big q = c` over the
//! vectorized channel, and the decision becomes: does `A_big q = c` admit a
//! nonnegative solution? That splits into a rank consistency test and,
//! via a generalized inverse and Farkas duality, a sign test on a small LP.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath::abs;
use crate::linalg::{
    self, default_rank_tol, kron, max_abs_diff, rank_from_svd, LinalgError, Matrix, Svd,
};
use crate::lp::{self, LpError, LpProblem, LpStatus, SolveOptions};
use crate::pmf::{JointPmf, PmfError, PMF_TOL};

/// Optima above `-VERDICT_TOL` count as zero. The LP data is
/// probability-scale, so genuine failures sit orders of magnitude below.
pub const VERDICT_TOL: f64 = 1e-8;
/// Residual allowed on the `A G A = A` defining property of a g-inverse.
pub const G_INVERSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// Row sums of the two marginals disagree, so they cannot share P_Y.
    MarginalMismatch {
        row: usize,
        yz_sum: f64,
        yx_sum: f64,
    },
    NegativeEntry {
        value: f64,
    },
    DimensionMismatch {
        expected: usize,
        actual: usize,
    },
    /// The supplied matrix fails `A G A = A` beyond [`G_INVERSE_TOL`].
    NotAGInverse {
        residual: f64,
    },
    /// The internal feasibility LP reported a status its construction
    /// rules out; indicates a solver defect.
    UnexpectedLpStatus,
    Pmf(PmfError),
    Linalg(LinalgError),
    Lp(LpError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::MarginalMismatch {
                row,
                yz_sum,
                yx_sum,
            } => write!(
                f,
                "marginal mismatch on row {row}: YZ side sums to {yz_sum}, YX side to {yx_sum}"
            ),
            SimError::NegativeEntry { value } => write!(f, "negative marginal entry {value}"),
            SimError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            SimError::NotAGInverse { residual } => {
                write!(f, "matrix is not a g-inverse (residual {residual})")
            }
            SimError::UnexpectedLpStatus => write!(f, "internal LP returned an impossible status"),
            SimError::Pmf(e) => write!(f, "{e}"),
            SimError::Linalg(e) => write!(f, "{e}"),
            SimError::Lp(e) => write!(f, "{e}"),
        }
    }
}

impl From<PmfError> for SimError {
    fn from(e: PmfError) -> Self {
        SimError::Pmf(e)
    }
}

impl From<LinalgError> for SimError {
    fn from(e: LinalgError) -> Self {
        SimError::Linalg(e)
    }
}

impl From<LpError> for SimError {
    fn from(e: LpError) -> Self {
        SimError::Lp(e)
    }
}

/// Alphabet sizes behind a [`LinearSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    pub x_size: usize,
    pub y_size: usize,
    pub z_size: usize,
}

/// The stacked system `a_big * q = c_vec` over the vectorized channel.
///
/// `a_big` is `(|Y||X| + |Z|) x (|Z||X|)`: the top block is `A ⊗ I` and the
/// bottom block `I ⊗ 1'` carries the row-sum constraints. `c_vec` stacks
/// the rows of `C` followed by ones.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a_big: Matrix,
    c_vec: Vec<f64>,
    dims: SystemDims,
}

impl LinearSystem {
    pub fn a_big(&self) -> &Matrix {
        &self.a_big
    }

    pub fn c_vec(&self) -> &[f64] {
        &self.c_vec
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    /// Number of stacked equations, `|Y||X| + |Z|`.
    pub fn m(&self) -> usize {
        self.a_big.rows()
    }

    /// Number of channel entries, `|Z||X|`.
    pub fn n(&self) -> usize {
        self.a_big.cols()
    }
}

/// Builds the stacked system from marginals `a = P_YZ` and `c = P_YX`.
pub fn build_system(a: &Matrix, c: &Matrix) -> Result<LinearSystem, SimError> {
    if a.rows() != c.rows() {
        return Err(SimError::DimensionMismatch {
            expected: a.rows(),
            actual: c.rows(),
        });
    }
    for &v in a.data().iter().chain(c.data().iter()) {
        if v.is_nan() || v < 0.0 {
            return Err(SimError::NegativeEntry { value: v });
        }
    }
    let y_size = a.rows();
    let z_size = a.cols();
    let x_size = c.cols();
    for row in 0..y_size {
        let yz_sum: f64 = a.row(row).iter().sum();
        let yx_sum: f64 = c.row(row).iter().sum();
        if abs(yz_sum - yx_sum) > PMF_TOL {
            return Err(SimError::MarginalMismatch {
                row,
                yz_sum,
                yx_sum,
            });
        }
    }

    let m = y_size * x_size + z_size;
    let n = z_size * x_size;
    let mut a_big = Matrix::zeros(m, n);
    let top = kron(a, &Matrix::identity(x_size));
    for i in 0..y_size * x_size {
        for j in 0..n {
            a_big[(i, j)] = top[(i, j)];
        }
    }
    for k in 0..z_size {
        for j in 0..x_size {
            a_big[(y_size * x_size + k, k * x_size + j)] = 1.0;
        }
    }

    let mut c_vec = linalg::vec_t(c);
    c_vec.resize(c_vec.len() + z_size, 1.0);

    Ok(LinearSystem {
        a_big,
        c_vec,
        dims: SystemDims {
            x_size,
            y_size,
            z_size,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub rank_a: usize,
    pub rank_aug: usize,
}

/// Rank test: the system has solutions iff the coefficient matrix and the
/// augmented matrix have the same numerical rank at relative tolerance
/// `tol`.
pub fn consistency(sys: &LinearSystem, tol: f64) -> Result<ConsistencyReport, SimError> {
    let rank_a = linalg::numerical_rank(&sys.a_big, tol)?;
    let aug = sys.a_big.augment_col(&sys.c_vec);
    let rank_aug = linalg::numerical_rank(&aug, tol)?;
    Ok(ConsistencyReport {
        consistent: rank_a == rank_aug,
        rank_a,
        rank_aug,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HStarSign {
    Zero,
    Negative,
}

/// Result of a Farkas sign test.
#[derive(Debug, Clone)]
pub struct SignCheck {
    pub sign: HStarSign,
    /// The achieved optimum of the normalized LP (0 when the sign is Zero).
    pub objective: f64,
    /// Multiplier vector certifying a Negative sign.
    pub witness: Option<Vec<f64>>,
    pub lp_iterations: usize,
}

/// Knobs shared by the sign checks.
#[derive(Debug, Clone, Copy)]
pub struct SignOptions {
    pub verdict_tol: f64,
    /// Stop the simplex as soon as any feasible multiplier with objective
    /// below `-verdict_tol` appears. Off by default so outcomes stay
    /// deterministic.
    pub early_termination: bool,
}

impl Default for SignOptions {
    fn default() -> Self {
        SignOptions {
            verdict_tol: VERDICT_TOL,
            early_termination: false,
        }
    }
}

/// Decides solvability of `ineq * p <= bound` (p free) through its Farkas
/// dual: minimize `bound' t` over `t >= 0` with `ineq' t = 0`. The feasible
/// set is a cone, so a normalization row `1't + slack = 1` keeps the LP
/// bounded; the optimum is 0 exactly when the inequality system has a
/// solution, and strictly negative otherwise.
fn farkas_sign(ineq: &Matrix, bound: &[f64], opts: &SignOptions) -> Result<SignCheck, SimError> {
    let n_mult = ineq.rows();
    debug_assert_eq!(bound.len(), n_mult);
    let n_free = ineq.cols();

    let mut constraints = Matrix::zeros(n_free + 1, n_mult + 1);
    for i in 0..n_free {
        for t in 0..n_mult {
            constraints[(i, t)] = ineq[(t, i)];
        }
    }
    for t in 0..n_mult + 1 {
        constraints[(n_free, t)] = 1.0;
    }

    let mut cost = bound.to_vec();
    cost.push(0.0);
    let mut rhs = vec![0.0; n_free];
    rhs.push(1.0);

    let problem = LpProblem::new(cost, constraints, rhs)?;
    let solve_opts = SolveOptions {
        stop_when_below: if opts.early_termination {
            Some(-opts.verdict_tol)
        } else {
            None
        },
    };
    let outcome = lp::solve_with(&problem, &solve_opts)?;
    if outcome.status != LpStatus::Optimal {
        // t = 0 is always feasible and the normalization bounds the value.
        return Err(SimError::UnexpectedLpStatus);
    }
    let objective = outcome.objective.unwrap_or(0.0);
    let solution = outcome.solution.unwrap_or_default();
    if objective < -opts.verdict_tol {
        Ok(SignCheck {
            sign: HStarSign::Negative,
            objective,
            witness: Some(solution[..n_mult].to_vec()),
            lp_iterations: outcome.iterations,
        })
    } else {
        Ok(SignCheck {
            sign: HStarSign::Zero,
            objective: 0.0,
            witness: None,
            lp_iterations: outcome.iterations,
        })
    }
}

/// Sign test through an explicit g-inverse of the system matrix.
///
/// Solvability of the stacked system with `q >= 0` is equivalent to
/// solvability of `(I - G A_big) p <= G c`, which the Farkas LP decides.
/// Consistency must already be established.
pub fn farkas_check(sys: &LinearSystem, g_inv: &Matrix) -> Result<SignCheck, SimError> {
    farkas_check_with(sys, g_inv, &SignOptions::default())
}

pub fn farkas_check_with(
    sys: &LinearSystem,
    g_inv: &Matrix,
    opts: &SignOptions,
) -> Result<SignCheck, SimError> {
    let m = sys.m();
    let n = sys.n();
    if g_inv.rows() != n || g_inv.cols() != m {
        return Err(SimError::DimensionMismatch {
            expected: n * m,
            actual: g_inv.rows() * g_inv.cols(),
        });
    }
    let aga = sys.a_big.matmul(g_inv).matmul(&sys.a_big);
    let residual = max_abs_diff(&aga, &sys.a_big);
    if residual > G_INVERSE_TOL {
        return Err(SimError::NotAGInverse { residual });
    }

    let ga = g_inv.matmul(&sys.a_big);
    let mut ineq = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            ineq[(i, j)] -= ga[(i, j)];
        }
    }
    let bound = g_inv.matvec(&sys.c_vec);
    farkas_sign(&ineq, &bound, opts)
}

/// Sign test on the nullspace coordinates only.
///
/// With the pseudoinverse as g-inverse, `I - A⁺A` projects onto the
/// nullspace of the system matrix, so the inequality system can be
/// restricted to the last `s = n - rank` right singular vectors. The LP
/// shrinks from `n` to `s` equality constraints and decides the same sign.
pub fn farkas_check_reduced(sys: &LinearSystem) -> Result<SignCheck, SimError> {
    farkas_check_reduced_with(sys, None, &SignOptions::default())
}

pub fn farkas_check_reduced_with(
    sys: &LinearSystem,
    rank_tol: Option<f64>,
    opts: &SignOptions,
) -> Result<SignCheck, SimError> {
    let dec = linalg::svd(&sys.a_big)?;
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(sys.m(), sys.n()));
    let rank = rank_from_svd(&dec, tol);
    reduced_sign_from_svd(sys, &dec, rank, tol, opts)
}

pub(crate) fn reduced_sign_from_svd(
    sys: &LinearSystem,
    dec: &Svd,
    rank: usize,
    tol: f64,
    opts: &SignOptions,
) -> Result<SignCheck, SimError> {
    let n = sys.n();
    let s = n - rank;
    let pinv = linalg::pinv_from_svd(dec, tol);
    let bound = pinv.matvec(&sys.c_vec);

    if s == 0 {
        // Full column rank: the inequality system reads 0 <= bound, so the
        // sign is the sign of the most negative coordinate.
        let (argmin, min) =
            bound
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
                );
        if min < -opts.verdict_tol {
            let mut witness = vec![0.0; n];
            witness[argmin] = 1.0;
            return Ok(SignCheck {
                sign: HStarSign::Negative,
                objective: min,
                witness: Some(witness),
                lp_iterations: 0,
            });
        }
        return Ok(SignCheck {
            sign: HStarSign::Zero,
            objective: 0.0,
            witness: None,
            lp_iterations: 0,
        });
    }

    let null_cols = Matrix::from_fn(n, s, |i, j| dec.v[(i, rank + j)]);
    farkas_sign(&null_cols, &bound, opts)
}

/// `pinv + (I - pinv * a) * w` is a g-inverse of `a` for any `w`; used to
/// exercise invariance of the sign test across g-inverse choices.
pub fn g_inverse_variant(a: &Matrix, a_pinv: &Matrix, w: &Matrix) -> Matrix {
    assert_eq!(a_pinv.rows(), w.rows());
    assert_eq!(a_pinv.cols(), w.cols());
    let pa = a_pinv.matmul(a);
    let mut proj = Matrix::identity(pa.rows());
    for i in 0..pa.rows() {
        for j in 0..pa.cols() {
            proj[(i, j)] -= pa[(i, j)];
        }
    }
    let correction = proj.matmul(w);
    Matrix::from_fn(a_pinv.rows(), a_pinv.cols(), |i, j| {
        a_pinv[(i, j)] + correction[(i, j)]
    })
}

/// Which simulatability question to ask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Can Z simulate X against Y?
    #[default]
    YFixedZToX,
    /// Can Z simulate Y against X? Runs the same pipeline with the roles
    /// of X and Y exchanged.
    XFixedZToY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpPath {
    /// Use the nullspace reduction when it shrinks the LP enough
    /// (`s < n/2`), the full g-inverse LP otherwise.
    #[default]
    Auto,
    Full,
    Reduced,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Relative rank tolerance; `None` means `max(m, n) * machine epsilon`.
    pub rank_tol: Option<f64>,
    pub verdict_tol: f64,
    pub lp_path: LpPath,
    pub early_termination: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            rank_tol: None,
            verdict_tol: VERDICT_TOL,
            lp_path: LpPath::Auto,
            early_termination: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictReason {
    /// Augmented rank exceeds the coefficient rank: no solution at all.
    RankMismatch,
    /// The system is consistent but admits no nonnegative solution.
    NegativeHStar,
    /// The sign test passed: a simulating channel exists.
    HStarZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GInverseKind {
    Pseudoinverse,
    Custom,
}

/// Diagnostic trail attached to a verdict.
#[derive(Debug, Clone)]
pub struct Trace {
    pub g_inverse: GInverseKind,
    pub reduction_used: bool,
    pub lp_iterations: usize,
    pub m: usize,
    pub n: usize,
}

/// The simulatability decision with its diagnostic trail.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub reason: VerdictReason,
    /// 0 when the sign test passes, the achieved negative optimum when it
    /// fails, absent when the rank test already failed.
    pub h_star: Option<f64>,
    pub rank_a: usize,
    pub rank_aug: usize,
    pub trace: Trace,
}

/// Full decision pipeline: marginals, stacked system, rank consistency,
/// then the Farkas sign test over the configured LP path.
pub fn check_simulatability(
    pmf: &JointPmf,
    direction: Direction,
    opts: &CheckOptions,
) -> Result<Verdict, SimError> {
    pmf.validate()?;
    let swapped;
    let working = match direction {
        Direction::YFixedZToX => pmf,
        Direction::XFixedZToY => {
            swapped = pmf.swap_xy();
            &swapped
        }
    };
    let a = working.marginal_yz();
    let c = working.marginal_yx();
    let sys = build_system(&a, &c)?;
    check_system(&sys, opts)
}

/// Same pipeline starting from an already stacked system.
pub fn check_system(sys: &LinearSystem, opts: &CheckOptions) -> Result<Verdict, SimError> {
    let m = sys.m();
    let n = sys.n();
    let tol = opts.rank_tol.unwrap_or_else(|| default_rank_tol(m, n));

    let dec = linalg::svd(&sys.a_big)?;
    let rank_a = rank_from_svd(&dec, tol);
    let aug = sys.a_big.augment_col(&sys.c_vec);
    let rank_aug = linalg::numerical_rank(&aug, tol)?;

    if rank_a != rank_aug {
        return Ok(Verdict {
            holds: false,
            reason: VerdictReason::RankMismatch,
            h_star: None,
            rank_a,
            rank_aug,
            trace: Trace {
                g_inverse: GInverseKind::Pseudoinverse,
                reduction_used: false,
                lp_iterations: 0,
                m,
                n,
            },
        });
    }

    let s = n - rank_a;
    let use_reduction = match opts.lp_path {
        LpPath::Auto => 2 * s < n,
        LpPath::Full => false,
        LpPath::Reduced => true,
    };
    let sign_opts = SignOptions {
        verdict_tol: opts.verdict_tol,
        early_termination: opts.early_termination,
    };
    let check = if use_reduction {
        reduced_sign_from_svd(sys, &dec, rank_a, tol, &sign_opts)?
    } else {
        let pinv = linalg::pinv_from_svd(&dec, tol);
        farkas_check_with(sys, &pinv, &sign_opts)?
    };

    let holds = check.sign == HStarSign::Zero;
    Ok(Verdict {
        holds,
        reason: if holds {
            VerdictReason::HStarZero
        } else {
            VerdictReason::NegativeHStar
        },
        h_star: Some(check.objective),
        rank_a,
        rank_aug,
        trace: Trace {
            g_inverse: GInverseKind::Pseudoinverse,
            reduction_used: use_reduction,
            lp_iterations: check.lp_iterations,
            m,
            n,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_t;

    #[test]
    fn stacked_system_matches_hand_layout() {
        let a = Matrix::from_rows(&[&[0.1, 0.15, 0.25], &[0.4, 0.1, 0.0]]);
        let c = Matrix::from_rows(&[&[0.3, 0.2], &[0.45, 0.05]]);
        let sys = build_system(&a, &c).unwrap();
        assert_eq!(sys.m(), 7);
        assert_eq!(sys.n(), 6);
        let expect = Matrix::from_rows(&[
            &[0.1, 0.0, 0.15, 0.0, 0.25, 0.0],
            &[0.0, 0.1, 0.0, 0.15, 0.0, 0.25],
            &[0.4, 0.0, 0.1, 0.0, 0.0, 0.0],
            &[0.0, 0.4, 0.0, 0.1, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        ]);
        assert_eq!(sys.a_big(), &expect);
        assert_eq!(sys.c_vec(), &[0.3, 0.2, 0.45, 0.05, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn singleton_alphabets_build_the_tiny_system() {
        let a = Matrix::from_rows(&[&[1.0]]);
        let c = Matrix::from_rows(&[&[1.0]]);
        let sys = build_system(&a, &c).unwrap();
        assert_eq!(sys.a_big(), &Matrix::from_rows(&[&[1.0], &[1.0]]));
        assert_eq!(sys.c_vec(), &[1.0, 1.0]);
    }

    #[test]
    fn marginal_mismatch_is_rejected() {
        let a = Matrix::from_rows(&[&[0.5, 0.2]]);
        let c = Matrix::from_rows(&[&[0.3, 0.3]]);
        let err = build_system(&a, &c).unwrap_err();
        assert!(matches!(err, SimError::MarginalMismatch { row: 0, .. }));
    }

    #[test]
    fn stacked_action_matches_definition() {
        // a_big applied to a vectorized Q must stack the rows of A*Q and
        // the row sums of Q.
        let a = Matrix::from_rows(&[&[0.2, 0.3], &[0.25, 0.25]]);
        let c = Matrix::from_rows(&[&[0.1, 0.4], &[0.3, 0.2]]);
        let sys = build_system(&a, &c).unwrap();
        let q = Matrix::from_rows(&[&[0.7, 0.3], &[0.1, 0.9]]);
        let got = sys.a_big().matvec(&vec_t(&q));
        let aq = a.matmul(&q);
        let mut expect = vec_t(&aq);
        expect.push(1.0);
        expect.push(1.0);
        for (g, e) in got.iter().zip(expect.iter()) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn consistency_detects_planted_rhs() {
        let a = Matrix::from_rows(&[&[0.2, 0.3], &[0.25, 0.25]]);
        let c = Matrix::from_rows(&[&[0.1, 0.4], &[0.3, 0.2]]);
        let sys = build_system(&a, &c).unwrap();
        let report = consistency(&sys, default_rank_tol(sys.m(), sys.n())).unwrap();
        assert!(report.rank_a <= 4);
        // The stacked rhs was not planted here, but any c built from a
        // stochastic Q must be consistent:
        let q = Matrix::from_rows(&[&[0.6, 0.4], &[0.2, 0.8]]);
        let c2 = a.matmul(&q);
        let sys2 = build_system(&a, &c2).unwrap();
        let report2 = consistency(&sys2, default_rank_tol(sys2.m(), sys2.n())).unwrap();
        assert!(report2.consistent);
    }

    #[test]
    fn g_inverse_variant_satisfies_definition() {
        let a = Matrix::from_rows(&[&[0.1, 0.0, 0.2], &[0.0, 0.3, 0.1]]);
        let pinv = linalg::pinv(&a, default_rank_tol(2, 3)).unwrap();
        let w = Matrix::from_rows(&[&[0.3, -0.2], &[1.0, 0.5], &[-0.7, 0.1]]);
        let g = g_inverse_variant(&a, &pinv, &w);
        let aga = a.matmul(&g).matmul(&a);
        assert!(max_abs_diff(&aga, &a) < 1e-12);
    }

    #[test]
    fn independent_x_and_y_always_simulatable() {
        // X independent of Y: the constant channel P(x) reproduces P_YX
        // from P_YZ, so the condition holds.
        let px = [0.3, 0.7];
        let py = [0.6, 0.4];
        let pmf = JointPmf::from_fn(2, 2, 2, |x, y, z| {
            let pz = if (x + y + z) % 2 == 0 { 0.55 } else { 0.45 };
            px[x] * py[y] * pz
        })
        .unwrap();
        let verdict =
            check_simulatability(&pmf, Direction::YFixedZToX, &CheckOptions::default()).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.reason, VerdictReason::HStarZero);
    }
}
