//! Small dense matrices and the factorizations the Krylov layer needs on its
//! projected problems: inversion, Householder least squares and a one-sided
//! Jacobi SVD.
//!
//! Storage is column-major, matching the frontal-slice layout of
//! [`Tensor3`](crate::Tensor3).

use std::ops::{Index, IndexMut};

use crate::error::{mismatch, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from column-major storage.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch(
                "Matrix::from_col_major",
                format!("{} values for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return Err(mismatch("Matrix::from_rows", "ragged rows"));
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(mismatch(
                "Matrix::matmul",
                format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        gemm_acc(self.rows, self.cols, other.cols, &self.data, &other.data, &mut out.data);
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(mismatch("Matrix::matvec", "vector length"));
        }
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.column(j)) {
                *yi += a * xj;
            }
        }
        Ok(y)
    }

    /// `selfᵀ · x`.
    pub fn tr_matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.rows {
            return Err(mismatch("Matrix::tr_matvec", "vector length"));
        }
        Ok((0..self.cols)
            .map(|j| self.column(j).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(mismatch("Matrix::inverse", "matrix is not square"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        let tiny = scale * T::epsilon() * T::from_len(n.max(1));
        for k in 0..n {
            let (piv, pval) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold(
                    (k, T::neg_infinity()),
                    |best, cur| {
                        if cur.1 > best.1 {
                            cur
                        } else {
                            best
                        }
                    },
                );
            if pval <= tiny {
                return Err(Error::Singular(format!("pivot {k} vanishes")));
            }
            if piv != k {
                a.swap_rows(piv, k);
                inv.swap_rows(piv, k);
            }
            let d = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= d;
                inv[(k, j)] /= d;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let akj = a[(k, j)];
                    let ikj = inv[(k, j)];
                    a[(i, j)] -= f * akj;
                    inv[(i, j)] -= f * ikj;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(j * self.rows + r1, j * self.rows + r2);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

/// `c += a · b` on column-major panels (`a` is m×k, `b` is k×n).
pub(crate) fn gemm_acc<T: Scalar>(m: usize, k: usize, n: usize, a: &[T], b: &[T], c: &mut [T]) {
    for j in 0..n {
        let cj = &mut c[j * m..(j + 1) * m];
        for p in 0..k {
            let bpj = b[j * k + p];
            if bpj == T::zero() {
                continue;
            }
            let ap = &a[p * m..(p + 1) * m];
            for (ci, &ai) in cj.iter_mut().zip(ap) {
                *ci += ai * bpj;
            }
        }
    }
}

/// `c += aᵀ · b` on column-major panels (`a` is k×m, `b` is k×n, `c` is m×n).
pub(crate) fn gemm_tn_acc<T: Scalar>(m: usize, k: usize, n: usize, a: &[T], b: &[T], c: &mut [T]) {
    for j in 0..n {
        let bj = &b[j * k..(j + 1) * k];
        for i in 0..m {
            let ai = &a[i * k..(i + 1) * k];
            c[j * m + i] += ai.iter().zip(bj).map(|(&x, &y)| x * y).sum::<T>();
        }
    }
}

/// `c += a · bᵀ` on column-major panels (`a` is m×k, `b` is n×k, `c` is m×n).
pub(crate) fn gemm_nt_acc<T: Scalar>(m: usize, k: usize, n: usize, a: &[T], b: &[T], c: &mut [T]) {
    for p in 0..k {
        let ap = &a[p * m..(p + 1) * m];
        for j in 0..n {
            let bjp = b[p * n + j];
            if bjp == T::zero() {
                continue;
            }
            let cj = &mut c[j * m..(j + 1) * m];
            for (ci, &ai) in cj.iter_mut().zip(ap) {
                *ci += ai * bjp;
            }
        }
    }
}

/// Least-squares solution of `min ‖a·x − b‖₂` by Householder QR.
///
/// Requires `rows ≥ cols` and full column rank.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(mismatch("lstsq", "rhs length"));
    }
    if m < n {
        return Err(mismatch("lstsq", "underdetermined system"));
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot: T = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = two * dot / vnorm2;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let dot: T = (k..m).map(|i| v[i - k] * rhs[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..m {
            rhs[i] -= f * v[i - k];
        }
    }
    let rmax = (0..n).fold(T::zero(), |acc, i| acc.max(r[(i, i)].abs()));
    let tiny = rmax * T::epsilon() * T::from_len(m.max(1));
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        if r[(i, i)].abs() <= tiny {
            return Err(Error::Singular(format!(
                "rank-deficient least-squares matrix (column {i})"
            )));
        }
        let s: T = ((i + 1)..n).map(|j| r[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / r[(i, i)];
    }
    Ok(x)
}

/// Full singular value decomposition `a = u · diag(s) · vᵀ`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// rows×rows orthogonal factor.
    pub u: Matrix<T>,
    /// min(rows, cols) singular values, nonincreasing.
    pub s: Vec<T>,
    /// cols×cols orthogonal factor.
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD with full (square) orthogonal factors.
pub fn svd<T: Scalar>(a: &Matrix<T>) -> Result<Svd<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut app, mut aqq, mut apq) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq == T::zero() || apq.abs() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (T::lit(2.0) * apq);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n)
        .map(|j| w.column(j).iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let smax = norms[order[0]];
    let cutoff = smax * eps * T::from_len(m);
    let mut u = Matrix::zeros(m, m);
    let mut vs = Matrix::zeros(n, n);
    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    for (k, &j) in order.iter().enumerate() {
        vs.column_mut(k).copy_from_slice(v.column(j));
    }
    // Left vectors of singular values below the cutoff come from completing
    // the basis; the values themselves are kept as computed.
    let filled = s.iter().take_while(|&&x| x > cutoff && x > T::zero()).count();
    for (k, &j) in order.iter().take(filled).enumerate() {
        let inv = T::one() / norms[j];
        for (ui, &wi) in u.column_mut(k).iter_mut().zip(w.column(j)) {
            *ui = wi * inv;
        }
    }
    complete_orthonormal(&mut u, filled);
    Ok(Svd { u, s, v: vs })
}

/// Fills columns `start..` of `q` so that all columns form an orthonormal
/// basis, given that columns `..start` are already orthonormal.
fn complete_orthonormal<T: Scalar>(q: &mut Matrix<T>, start: usize) {
    let m = q.rows();
    let mut next = start;
    let mut candidate = 0;
    while next < q.cols() && candidate < m {
        let mut e = vec![T::zero(); m];
        e[candidate] = T::one();
        candidate += 1;
        for _pass in 0..2 {
            for k in 0..next {
                let dot: T = q.column(k).iter().zip(&e).map(|(&a, &b)| a * b).sum();
                for (ei, &qi) in e.iter_mut().zip(q.column(k)) {
                    *ei -= dot * qi;
                }
            }
        }
        let norm = e.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm > T::lit(1e-3) {
            for (qi, ei) in q.column_mut(next).iter_mut().zip(e) {
                *qi = ei / norm;
            }
            next += 1;
        }
    }
}
