//! Dense matrices, singular value decompositions and the matrix norms built
//! on top of them.
//!
//! Decompositions are delegated to `faer` and always run sequentially, so a
//! given input produces the same bits no matter how many threads the caller
//! is using elsewhere.

use std::fmt;
use std::ops::Index;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::matmul::matmul;
use faer::linalg::{evd, svd as faer_svd};
use faer::diag::Diag;
use faer::{Accum, Mat, MatRef, Par};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used by [`numerical_rank`] when callers have no better
/// choice: the double-precision noise floor for desk-scale matrices.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Row-major matrix of finite reals.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{})", self.rows, self.cols)?;
        if self.rows * self.cols <= 64 {
            f.debug_list().entries(self.row_iter()).finish()?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting empty shapes, length
    /// mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has no entries")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Fills entry `(i, j)` with `f(i, j)`. The closure must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_fn(rows, cols, |_, _| value)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Overwrites one entry. The value must be finite.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(value.is_finite());
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Applies `f` entrywise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|x| x * factor)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::<f64>::zeros(self.rows, other.cols);
        matmul(
            out.as_mut(),
            Accum::Replace,
            self.as_faer(),
            other.as_faer(),
            1.0,
            Par::Seq,
        );
        Ok(Self::from_faer(out.as_ref()))
    }

    /// Largest absolute entry (0 for the zero matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference between `self` and its transpose.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() == 0.0
    }

    pub(crate) fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub(crate) fn from_faer(m: MatRef<'_, f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

/// Thin singular value decomposition `A = Σ s_i u_i v_iᵀ`.
///
/// `left` is `rows × k` and `right` is `cols × k` with `k = min(rows, cols)`;
/// column `i` of each holds `u_i` / `v_i`. Singular values are descending.
#[derive(Clone, Debug)]
pub struct SvdFactorization {
    pub singular_values: Vec<f64>,
    pub left: DenseMatrix,
    pub right: DenseMatrix,
}

impl SvdFactorization {
    pub fn rank_capacity(&self) -> usize {
        self.singular_values.len()
    }

    /// `scale · Σ_{i ∈ indices} s_i u_i v_iᵀ`.
    pub fn partial_sum(&self, indices: &[usize], scale: f64) -> DenseMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        if indices.is_empty() {
            return DenseMatrix::zeros(m, n);
        }
        let k = indices.len();
        let lhs = Mat::<f64>::from_fn(m, k, |i, c| {
            self.left.get(i, indices[c]) * self.singular_values[indices[c]] * scale
        });
        let rhs = Mat::<f64>::from_fn(k, n, |c, j| self.right.get(j, indices[c]));
        let mut out = Mat::<f64>::zeros(m, n);
        matmul(out.as_mut(), Accum::Replace, lhs.as_ref(), rhs.as_ref(), 1.0, Par::Seq);
        DenseMatrix::from_faer(out.as_ref())
    }

    /// Rebuilds the full matrix from every triple.
    pub fn reconstruct(&self) -> DenseMatrix {
        let all: Vec<usize> = (0..self.rank_capacity()).collect();
        self.partial_sum(&all, 1.0)
    }
}

/// Thin SVD of an arbitrary matrix.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactorization> {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut s = Diag::<f64>::zeros(k);
    let mut u = Mat::<f64>::zeros(m, k);
    let mut v = Mat::<f64>::zeros(n, k);
    let thin = faer_svd::ComputeSvdVectors::Thin;
    let scratch = faer_svd::svd_scratch::<f64>(m, n, thin, thin, Par::Seq, Default::default());
    faer_svd::svd(
        a.as_faer(),
        s.as_mut(),
        Some(u.as_mut()),
        Some(v.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|_| Error::NoConvergence("singular value decomposition"))?;

    let values: Vec<f64> = s.column_vector().iter().map(|x| x.max(0.0)).collect();
    let order = descending_order(&values);
    Ok(SvdFactorization {
        singular_values: order.iter().map(|&c| values[c]).collect(),
        left: DenseMatrix::from_fn(m, k, |i, c| u[(i, order[c])]),
        right: DenseMatrix::from_fn(n, k, |j, c| v[(j, order[c])]),
    })
}

/// SVD of a symmetric matrix obtained from its eigendecomposition
/// `A = Σ λ_i q_i q_iᵀ`: `s_i = |λ_i|`, `u_i = q_i`, `v_i = sign(λ_i) q_i`.
///
/// Only the lower triangle is read, so the caller must pass a symmetric matrix.
pub fn svd_symmetric(a: &DenseMatrix) -> Result<SvdFactorization> {
    if !a.is_square() {
        return Err(Error::Shape("symmetric SVD needs a square matrix".into()));
    }
    let n = a.rows();
    let (lambda, q) = eigh(a, true)?;
    let q = q.expect("eigenvectors requested");
    let abs: Vec<f64> = lambda.iter().map(|x| x.abs()).collect();
    let order = descending_order(&abs);
    Ok(SvdFactorization {
        singular_values: order.iter().map(|&c| abs[c]).collect(),
        left: DenseMatrix::from_fn(n, n, |i, c| q[(i, order[c])]),
        right: DenseMatrix::from_fn(n, n, |i, c| {
            let sign = if lambda[order[c]] < 0.0 { -1.0 } else { 1.0 };
            sign * q[(i, order[c])]
        }),
    })
}

/// Singular values only, descending.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    let mut s = Diag::<f64>::zeros(m.min(n));
    let no = faer_svd::ComputeSvdVectors::No;
    let scratch = faer_svd::svd_scratch::<f64>(m, n, no, no, Par::Seq, Default::default());
    faer_svd::svd(
        a.as_faer(),
        s.as_mut(),
        None,
        None,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let mut values: Vec<f64> = s.column_vector().iter().map(|x| x.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Eigenvalues of a symmetric matrix in nondecreasing order (lower triangle read).
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Shape("eigenvalues need a square matrix".into()));
    }
    Ok(eigh(a, false)?.0)
}

fn eigh(a: &DenseMatrix, vectors: bool) -> Result<(Vec<f64>, Option<Mat<f64>>)> {
    let n = a.rows();
    let mut s = Diag::<f64>::zeros(n);
    let mut q = vectors.then(|| Mat::<f64>::zeros(n, n));
    let compute = if vectors {
        evd::ComputeEigenvectors::Yes
    } else {
        evd::ComputeEigenvectors::No
    };
    let scratch = evd::self_adjoint_evd_scratch::<f64>(n, compute, Par::Seq, Default::default());
    evd::self_adjoint_evd(
        a.as_faer(),
        s.as_mut(),
        q.as_mut().map(|q| q.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|_| Error::NoConvergence("symmetric eigendecomposition"))?;
    let mut values: Vec<f64> = s.column_vector().iter().copied().collect();
    if !vectors {
        values.sort_by(f64::total_cmp);
    }
    Ok((values, q))
}

/// Stable descending order of `values`; ties keep their original order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Sum of the singular values.
pub fn nuclear_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Largest singular value.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Largest |eigenvalue| of a symmetric matrix; cheaper than [`spectral_norm`].
pub fn spectral_norm_symmetric(a: &DenseMatrix) -> Result<f64> {
    let ev = symmetric_eigenvalues(a)?;
    Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
}

pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Number of singular values strictly greater than `tol · s_1`; zero for the
/// zero matrix.
pub fn numerical_rank(a: &DenseMatrix, tol: f64) -> Result<usize> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance {tol} must be >= 0")));
    }
    let s = singular_values(a)?;
    if s[0] == 0.0 {
        return Ok(0);
    }
    let cutoff = tol * s[0];
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}
