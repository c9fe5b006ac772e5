//! Definitional c-product through the block Toeplitz-plus-Hankel matricization.
//!
//! `mat(A)` is the n1·n3 × n2·n3 block matrix whose block `(i, j)` (one-based)
//! is `A_{|i−j|+1}` from the Toeplitz part plus, from the Hankel part,
//! `A_{i+j}` when `i+j ≤ n3`, `A_{2n3+2−i−j}` when `i+j ≥ n3+2`, and zero on
//! the anti-diagonal `i+j = n3+1`. This materializes everything densely and
//! is only meant for small sizes, as an independent check on the fast path.

use crate::dense::Matrix;
use crate::error::{mismatch, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Default cap on the row count of a materialized `mat(·)`.
pub const DEFAULT_ORACLE_ROW_CAP: usize = 4096;

/// Index (zero-based) of the frontal slice found at block `(i, j)` of the
/// Hankel part, or `None` on its zero anti-diagonal.
fn hankel_slice(i: usize, j: usize, n3: usize) -> Option<usize> {
    let s = i + j + 2; // one-based i + j
    if s <= n3 {
        Some(s - 1)
    } else if s >= n3 + 2 {
        Some(2 * n3 + 2 - s - 1)
    } else {
        None
    }
}

/// Block Toeplitz-plus-Hankel matricization `mat(A)`.
pub fn mat<T: Scalar>(a: &Tensor3<T>) -> Matrix<T> {
    let (n1, n2, n3) = (a.n1(), a.n2(), a.n3());
    let mut out = Matrix::zeros(n1 * n3, n2 * n3);
    for bi in 0..n3 {
        for bj in 0..n3 {
            let toeplitz = a.slice_data(bi.abs_diff(bj));
            let hankel = hankel_slice(bi, bj, n3).map(|k| a.slice_data(k));
            for c in 0..n2 {
                for r in 0..n1 {
                    let mut v = toeplitz[r + n1 * c];
                    if let Some(h) = hankel {
                        v += h[r + n1 * c];
                    }
                    out[(bi * n1 + r, bj * n2 + c)] = v;
                }
            }
        }
    }
    out
}

/// Inverse of [`mat`]: recovers the tensor from the first block column.
///
/// That column holds `A_k + A_{k+1}` in block row `k` (and `A_n3` alone in
/// the last one), so the slices follow by back substitution.
pub fn ten<T: Scalar>(m: &Matrix<T>, n1: usize, n2: usize, n3: usize) -> Result<Tensor3<T>> {
    if m.rows() != n1 * n3 || m.cols() != n2 * n3 {
        return Err(mismatch(
            "ten",
            format!("{}x{} block matrix for {n1}x{n2}x{n3}", m.rows(), m.cols()),
        ));
    }
    let mut out = Tensor3::zeros(n1, n2, n3)?;
    for k in (0..n3).rev() {
        for c in 0..n2 {
            for r in 0..n1 {
                let mut v = m[(k * n1 + r, c)];
                if k + 1 < n3 {
                    v -= out.get(r, c, k + 1);
                }
                out.set(r, c, k, v);
            }
        }
    }
    Ok(out)
}

/// `ten(mat(A) · mat(B))` with the default size cap.
pub fn oracle_product<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<Tensor3<T>> {
    oracle_product_capped(a, b, DEFAULT_ORACLE_ROW_CAP)
}

/// `ten(mat(A) · mat(B))`, refusing to materialize more than `row_cap` rows.
pub fn oracle_product_capped<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>, row_cap: usize) -> Result<Tensor3<T>> {
    if a.n2() != b.n1() || a.n3() != b.n3() {
        return Err(mismatch("oracle_product", format!("{} times {}", a.dims(), b.dims())));
    }
    let needed = (a.n1() * a.n3()).max(b.n1() * b.n3());
    if needed > row_cap {
        return Err(Error::SizeGuard {
            what: "oracle_product",
            needed,
            cap: row_cap,
        });
    }
    let prod = mat(a).matmul(&mat(b))?;
    ten(&prod, a.n1(), b.n2(), a.n3())
}
