//! Joint PMFs over three finite alphabets and row-stochastic channels.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath::abs;
use crate::linalg::Matrix;

/// Normalization slack allowed on probability tables and channel rows.
///
/// Inputs are human-entered decimals; accumulation error over the table
/// sizes in scope stays far below this.
pub const PMF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum PmfError {
    /// Some entry is negative (beyond tolerance where one applies).
    NegativeMass { index: usize, value: f64 },
    /// Entries do not sum to 1 within [`PMF_TOL`].
    NotNormalized { sum: f64 },
    /// One of the alphabets has size zero.
    EmptyAlphabet,
    /// Table or label length disagrees with the declared alphabet sizes.
    DimensionMismatch { expected: usize, actual: usize },
    /// A channel entry lies outside `[0, 1]` beyond tolerance.
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    /// A channel row does not sum to 1 within tolerance.
    RowNotStochastic { row: usize, sum: f64 },
    /// A family parameter lies outside `[0, 1]`.
    ParameterOutOfRange { name: &'static str, value: f64 },
}

impl fmt::Display for PmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmfError::NegativeMass { index, value } => {
                write!(f, "negative probability {value} at flat index {index}")
            }
            PmfError::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, not 1"),
            PmfError::EmptyAlphabet => write!(f, "alphabets must have at least one symbol"),
            PmfError::DimensionMismatch { expected, actual } => {
                write!(f, "expected {expected} values, got {actual}")
            }
            PmfError::EntryOutOfRange { row, col, value } => {
                write!(f, "channel entry ({row},{col}) = {value} outside [0,1]")
            }
            PmfError::RowNotStochastic { row, sum } => {
                write!(f, "channel row {row} sums to {sum}, not 1")
            }
            PmfError::ParameterOutOfRange { name, value } => {
                write!(f, "parameter {name} = {value} outside [0,1]")
            }
        }
    }
}

/// Optional symbol names for the three alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

/// A normalized probability table over `X × Y × Z`.
///
/// Zero-probability symbols are kept; pruning them would change the
/// dimensions of every matrix built downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    probs: Vec<f64>,
    labels: Option<Labels>,
}

impl JointPmf {
    /// Builds and validates a PMF from a flat table indexed `(x, y, z)`,
    /// `z` fastest.
    pub fn new(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        probs: Vec<f64>,
    ) -> Result<Self, PmfError> {
        let pmf = JointPmf {
            x_size,
            y_size,
            z_size,
            probs,
            labels: None,
        };
        pmf.validate()?;
        Ok(pmf)
    }

    pub fn from_fn(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self, PmfError> {
        let mut probs = vec![0.0; x_size * y_size * z_size];
        for x in 0..x_size {
            for y in 0..y_size {
                for z in 0..z_size {
                    probs[(x * y_size + y) * z_size + z] = f(x, y, z);
                }
            }
        }
        JointPmf::new(x_size, y_size, z_size, probs)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self, PmfError> {
        for (len, size) in [
            (labels.x.len(), self.x_size),
            (labels.y.len(), self.y_size),
            (labels.z.len(), self.z_size),
        ] {
            if len != size {
                return Err(PmfError::DimensionMismatch {
                    expected: size,
                    actual: len,
                });
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Checks every invariant: sizes positive, entries nonnegative, total
    /// mass 1 within [`PMF_TOL`].
    pub fn validate(&self) -> Result<(), PmfError> {
        if self.x_size == 0 || self.y_size == 0 || self.z_size == 0 {
            return Err(PmfError::EmptyAlphabet);
        }
        let expected = self.x_size * self.y_size * self.z_size;
        if self.probs.len() != expected {
            return Err(PmfError::DimensionMismatch {
                expected,
                actual: self.probs.len(),
            });
        }
        for (index, &value) in self.probs.iter().enumerate() {
            if value.is_nan() || value < 0.0 {
                return Err(PmfError::NegativeMass { index, value });
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if abs(sum - 1.0) > PMF_TOL {
            return Err(PmfError::NotNormalized { sum });
        }
        Ok(())
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn prob(&self, x: usize, y: usize, z: usize) -> f64 {
        self.probs[(x * self.y_size + y) * self.z_size + z]
    }

    /// The `|Y| x |Z|` marginal over X: entry `(i, k)` is `P(Y=i, Z=k)`.
    pub fn marginal_yz(&self) -> Matrix {
        Matrix::from_fn(self.y_size, self.z_size, |i, k| {
            (0..self.x_size).map(|x| self.prob(x, i, k)).sum()
        })
    }

    /// The `|Y| x |X|` marginal over Z: entry `(i, j)` is `P(Y=i, X=j)`.
    pub fn marginal_yx(&self) -> Matrix {
        Matrix::from_fn(self.y_size, self.x_size, |i, j| {
            (0..self.z_size).map(|z| self.prob(j, i, z)).sum()
        })
    }

    /// Exchanges the roles of X and Y so that the same pipeline answers the
    /// question for the other direction.
    pub fn swap_xy(&self) -> JointPmf {
        let mut probs = vec![0.0; self.probs.len()];
        for x in 0..self.y_size {
            for y in 0..self.x_size {
                for z in 0..self.z_size {
                    probs[(x * self.x_size + y) * self.z_size + z] = self.prob(y, x, z);
                }
            }
        }
        JointPmf {
            x_size: self.y_size,
            y_size: self.x_size,
            z_size: self.z_size,
            probs,
            labels: self.labels.as_ref().map(|l| Labels {
                x: l.y.clone(),
                y: l.x.clone(),
                z: l.z.clone(),
            }),
        }
    }
}

/// A pair of binary symbols observed through an erasure side channel.
///
/// `X` and `Y` agree with probability `1 - alpha` (each joint symbol has
/// mass `(1-alpha)/2` on the diagonal, `alpha/2` off it). The observer sees
/// the pair `(X, Y)` with probability `gamma` and an erasure symbol
/// otherwise, so `|Z| = 5` with the pair states ordered x-fastest and the
/// erasure last.
pub fn binary_symmetric_erasure(alpha: f64, gamma: f64) -> Result<JointPmf, PmfError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(PmfError::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
        });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(PmfError::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    JointPmf::from_fn(2, 2, 5, |x, y, z| {
        let pair_mass = if x == y {
            (1.0 - alpha) / 2.0
        } else {
            alpha / 2.0
        };
        if z == 4 {
            pair_mass * (1.0 - gamma)
        } else if z == x + 2 * y {
            pair_mass * gamma
        } else {
            0.0
        }
    })
}

/// Couples a marginal pair into a full joint PMF by making X and Z
/// conditionally independent given Y: `P(x,y,z) = a[y][z] c[y][x] / P_Y(y)`.
///
/// `a` plays P_YZ and `c` plays P_YX; they must share row sums (the Y
/// marginal). The coupling reproduces both marginals exactly, and since
/// the simulatability question depends only on the pair, it inherits the
/// pair's verdict.
pub fn couple_marginals(a: &Matrix, c: &Matrix) -> Result<JointPmf, PmfError> {
    if a.rows() != c.rows() {
        return Err(PmfError::DimensionMismatch {
            expected: a.rows(),
            actual: c.rows(),
        });
    }
    let y_size = a.rows();
    let z_size = a.cols();
    let x_size = c.cols();
    let py: Vec<f64> = (0..y_size).map(|i| a.row(i).iter().sum()).collect();
    JointPmf::from_fn(x_size, y_size, z_size, |x, y, z| {
        if py[y] <= 0.0 {
            0.0
        } else {
            a[(y, z)] * c[(y, x)] / py[y]
        }
    })
}

/// Conditional PMF as a matrix: entry `(k, j)` is `P(output j | input k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl Channel {
    /// Builds a channel, checking row-stochasticity within `tol`.
    ///
    /// Entries are stored as given; validation allows slack `tol` on the
    /// `[0, 1]` bounds and on each row sum.
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>, tol: f64) -> Result<Self, PmfError> {
        if rows == 0 || cols == 0 {
            return Err(PmfError::EmptyAlphabet);
        }
        if probs.len() != rows * cols {
            return Err(PmfError::DimensionMismatch {
                expected: rows * cols,
                actual: probs.len(),
            });
        }
        let ch = Channel { rows, cols, probs };
        ch.validate(tol)?;
        Ok(ch)
    }

    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self, PmfError> {
        Channel::new(m.rows(), m.cols(), m.data().to_vec(), tol)
    }

    pub fn validate(&self, tol: f64) -> Result<(), PmfError> {
        for row in 0..self.rows {
            let mut sum = 0.0;
            for col in 0..self.cols {
                let value = self.prob(row, col);
                if !(value >= -tol && value <= 1.0 + tol) {
                    return Err(PmfError::EntryOutOfRange { row, col, value });
                }
                sum += value;
            }
            if abs(sum - 1.0) > tol {
                return Err(PmfError::RowNotStochastic { row, sum });
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prob(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.cols + col]
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_vec(self.rows, self.cols, self.probs.clone())
    }
}
