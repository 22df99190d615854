//! Small dense real linear algebra.
//!
//! Everything here is sized for probability-scale systems with at most a
//! few hundred rows, so matrices are plain row-major `Vec<f64>` values and
//! the SVD is a one-sided Jacobi iteration. No views, no sparsity.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::fmath::{abs, sqrt};

/// Relative off-diagonal threshold at which a Jacobi rotation is skipped.
const JACOBI_REL_TOL: f64 = 1e-14;
/// Cyclic sweep budget for the Jacobi SVD.
const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// The Jacobi iteration did not settle within the sweep budget.
    ConvergenceFailure { sweeps: usize },
    /// Vector length or matrix shape does not match what the operation needs.
    DimensionMismatch { expected: usize, actual: usize },
    /// Input contains NaN or infinite entries.
    NonFiniteInput,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::ConvergenceFailure { sweeps } => {
                write!(f, "SVD did not converge within {sweeps} sweeps")
            }
            LinalgError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            LinalgError::NonFiniteInput => write!(f, "input contains NaN or infinite entries"),
        }
    }
}

/// Dense row-major matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    /// Wraps a row-major buffer. Panics if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on length mismatch.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Appends `v` as an extra column.
    pub fn augment_col(&self, v: &[f64]) -> Matrix {
        assert_eq!(self.rows, v.len(), "column length mismatch");
        let mut out = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            out[(i, self.cols)] = v[i];
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &v| {
            let a = abs(v);
            if a > acc {
                a
            } else {
                acc
            }
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Largest entrywise difference between two equally shaped matrices.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.cols, b.cols);
    let mut worst = 0.0;
    for (x, y) in a.data.iter().zip(b.data.iter()) {
        let d = abs(x - y);
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Kronecker product: block `(i, k)` of the result is `a[(i, k)] * b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = Matrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let scale = a[(i, k)];
            if scale == 0.0 {
                continue;
            }
            for r in 0..p {
                for s in 0..q {
                    out[(i * p + r, k * q + s)] = scale * b[(r, s)];
                }
            }
        }
    }
    out
}

/// Row-by-row read of `q`, i.e. the vectorization of `q` transposed.
pub fn vec_t(q: &Matrix) -> Vec<f64> {
    q.data.clone()
}

/// Inverse of [`vec_t`]: fills a `rows x cols` matrix row by row.
pub fn reshape_t(v: &[f64], rows: usize, cols: usize) -> Result<Matrix, LinalgError> {
    if v.len() != rows * cols {
        return Err(LinalgError::DimensionMismatch {
            expected: rows * cols,
            actual: v.len(),
        });
    }
    Ok(Matrix::from_vec(rows, cols, v.to_vec()))
}

/// Full singular value decomposition `g = u * diag(sigma) * v^T`.
///
/// `u` is `m x m` orthogonal, `v` is `n x n` orthogonal, and `sigma` holds
/// the `min(m, n)` singular values sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Default relative cutoff for rank decisions: `max(m, n) * machine epsilon`.
///
/// Singular values at or below `cutoff * sigma_max` count as zero.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    let dim = if rows > cols { rows } else { cols };
    dim as f64 * f64::EPSILON
}

/// One-sided Jacobi SVD with cyclic sweeps.
pub fn svd(g: &Matrix) -> Result<Svd, LinalgError> {
    if !g.is_finite() {
        return Err(LinalgError::NonFiniteInput);
    }
    if g.rows >= g.cols {
        svd_tall(g)
    } else {
        let flipped = svd_tall(&g.transpose())?;
        Ok(Svd {
            u: flipped.v,
            sigma: flipped.sigma,
            v: flipped.u,
        })
    }
}

fn column_dots(w: &Matrix, p: usize, q: usize) -> (f64, f64, f64) {
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = 0.0;
    for i in 0..w.rows {
        let wp = w[(i, p)];
        let wq = w[(i, q)];
        app += wp * wp;
        aqq += wq * wq;
        apq += wp * wq;
    }
    (app, aqq, apq)
}

fn svd_tall(g: &Matrix) -> Result<Svd, LinalgError> {
    let (m, n) = (g.rows, g.cols);
    debug_assert!(m >= n);
    let mut w = g.clone();
    let mut v = Matrix::identity(n);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (app, aqq, apq) = column_dots(&w, p, q);
                if abs(apq) <= JACOBI_REL_TOL * sqrt(app) * sqrt(aqq) {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(LinalgError::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut norms: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..m {
                acc += w[(i, j)] * w[(i, j)];
            }
            sqrt(acc)
        })
        .collect();

    // Sort singular values nonincreasing, permuting the columns of W and V.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut u = Matrix::zeros(m, m);
    let mut v_sorted = Matrix::zeros(n, n);
    let mut sigma = vec![0.0; n];
    for (new_j, &old_j) in order.iter().enumerate() {
        sigma[new_j] = norms[old_j];
        for i in 0..n {
            v_sorted[(i, new_j)] = v[(i, old_j)];
        }
    }
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap());

    // Columns with a meaningful norm come straight from W; the rest of the
    // orthogonal basis is completed below.
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let drop_below = sigma_max * default_rank_tol(m, n);
    let mut filled = vec![false; m];
    for (new_j, &old_j) in order.iter().enumerate() {
        if sigma[new_j] > drop_below && sigma[new_j] > 0.0 {
            for i in 0..m {
                u[(i, new_j)] = w[(i, old_j)] / sigma[new_j];
            }
            filled[new_j] = true;
        }
    }
    complete_orthonormal(&mut u, &filled);

    Ok(Svd {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Fills the unfilled columns of `u` with an orthonormal completion of the
/// filled ones, chosen from the coordinate directions.
fn complete_orthonormal(u: &mut Matrix, filled: &[bool]) {
    let m = u.rows();
    let mut have: Vec<usize> = (0..m).filter(|&j| filled[j]).collect();
    for slot in 0..m {
        if filled[slot] {
            continue;
        }
        // Pick the coordinate direction with the largest residual after
        // projecting out the columns gathered so far.
        let mut best_cand = 0;
        let mut best_norm = -1.0;
        for cand in 0..m {
            let mut resid: Vec<f64> = (0..m).map(|i| if i == cand { 1.0 } else { 0.0 }).collect();
            project_out(u, &have, &mut resid);
            let nrm = sqrt(resid.iter().map(|x| x * x).sum());
            if nrm > best_norm {
                best_norm = nrm;
                best_cand = cand;
            }
        }
        let mut col: Vec<f64> = (0..m)
            .map(|i| if i == best_cand { 1.0 } else { 0.0 })
            .collect();
        // Two projection passes keep the completion orthogonal to working
        // precision even when the residual direction is small.
        project_out(u, &have, &mut col);
        project_out(u, &have, &mut col);
        let nrm = sqrt(col.iter().map(|x| x * x).sum::<f64>());
        for i in 0..m {
            u[(i, slot)] = col[i] / nrm;
        }
        have.push(slot);
    }
}

fn project_out(u: &Matrix, cols: &[usize], v: &mut [f64]) {
    for &j in cols {
        let mut dot = 0.0;
        for i in 0..u.rows() {
            dot += u[(i, j)] * v[i];
        }
        for i in 0..u.rows() {
            v[i] -= dot * u[(i, j)];
        }
    }
}

/// Number of singular values strictly above `tol * sigma_max`.
pub fn numerical_rank(g: &Matrix, tol: f64) -> Result<usize, LinalgError> {
    let dec = svd(g)?;
    Ok(rank_from_svd(&dec, tol))
}

/// Rank decision reusing an existing decomposition.
pub fn rank_from_svd(dec: &Svd, tol: f64) -> usize {
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max;
    dec.sigma.iter().filter(|&&s| s > cutoff).count()
}

/// Moore-Penrose pseudoinverse via the SVD.
///
/// Singular values at or below `tol * sigma_max` are treated as zero.
pub fn pinv(g: &Matrix, tol: f64) -> Result<Matrix, LinalgError> {
    let dec = svd(g)?;
    Ok(pinv_from_svd(&dec, tol))
}

/// Pseudoinverse reusing an existing decomposition.
pub fn pinv_from_svd(dec: &Svd, tol: f64) -> Matrix {
    let m = dec.u.rows();
    let n = dec.v.rows();
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max;
    let mut out = Matrix::zeros(n, m);
    for (k, &s) in dec.sigma.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vik = dec.v[(i, k)] * inv;
            if vik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[(i, j)] += vik * dec.u[(j, k)];
            }
        }
    }
    out
}
