//! The mode-3 cosine transform that block-diagonalizes the c-product.
//!
//! The transform matrix is `M = W⁻¹ · C · (I + Z)` where `C` is the
//! orthogonal DCT-II matrix, `W = diag(C(:,1))` and `Z` is the unit
//! superdiagonal. Under `M` the product `ten(mat(A)·mat(B))` of two tensors
//! becomes independent matrix products of their frontal slices.

use crate::dense::Matrix;
use crate::error::{mismatch, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Orthogonal DCT-II matrix of order `n`.
///
/// Entry `(i, j)` (zero-based) is `sqrt((2 − δ_{i0})/n) · cos(i(2j+1)π/(2n))`.
pub fn dct_matrix<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension("DCT order must be positive".into()));
    }
    let nf = n as f64;
    Ok(Matrix::from_fn(n, n, |i, j| {
        let w = if i == 0 { 1.0 / nf } else { 2.0 / nf };
        let angle = (i as f64) * (2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * nf);
        T::lit(w.sqrt() * angle.cos())
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// A pair of mutually inverse n3×n3 matrices acting on tubes.
#[derive(Clone, Debug)]
pub struct TubeTransform<T> {
    size: usize,
    forward: Matrix<T>,
    inverse: Matrix<T>,
}

/// Builds the cosine tube transform `M = W⁻¹ C (I + Z)` and its inverse.
pub fn make_transform<T: Scalar>(n3: usize) -> Result<TubeTransform<T>> {
    // Built in f64 and rounded once so f32 transforms are as accurate as f32 allows.
    let c = dct_matrix::<f64>(n3)?;
    let i_plus_z = Matrix::from_fn(n3, n3, |i, j| if j == i || j == i + 1 { 1.0 } else { 0.0 });
    let w_inv = Matrix::diag(&(0..n3).map(|i| 1.0 / c[(i, 0)]).collect::<Vec<_>>());
    let m = w_inv.matmul(&c)?.matmul(&i_plus_z)?;
    let m_inv = m.inverse()?;
    let cast = |a: &Matrix<f64>| Matrix::from_fn(n3, n3, |i, j| T::lit(a[(i, j)]));
    Ok(TubeTransform {
        size: n3,
        forward: cast(&m),
        inverse: cast(&m_inv),
    })
}

impl<T: Scalar> TubeTransform<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn forward(&self) -> &Matrix<T> {
        &self.forward
    }

    pub fn inverse(&self) -> &Matrix<T> {
        &self.inverse
    }

    /// The pair `(M⁻ᵀ, Mᵀ)`.
    ///
    /// If `X ↦ T⁻¹(Â ∘ T(X))` is a facewise operator under this transform,
    /// its Frobenius adjoint is `Y ↦ Tᵀ(Âᵀ ∘ T⁻ᵀ(Y))`, i.e. the facewise
    /// operator with transposed slices under the adjoint pair.
    pub fn adjoint(&self) -> Self {
        Self {
            size: self.size,
            forward: self.inverse.transpose(),
            inverse: self.forward.transpose(),
        }
    }

    fn matrix(&self, direction: Direction) -> &Matrix<T> {
        match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        }
    }

    /// Replaces every tube `A(i,j,:)` by `M·A(i,j,:)` or `M⁻¹·A(i,j,:)`.
    pub fn apply(&self, a: &Tensor3<T>, direction: Direction) -> Result<Tensor3<T>> {
        if a.n3() != self.size {
            return Err(mismatch(
                "transform_mode3",
                format!("tube length {} vs transform size {}", a.n3(), self.size),
            ));
        }
        let m = self.matrix(direction);
        let mut out = Tensor3::zeros_like(a);
        for k in 0..self.size {
            let dst = out.slice_data_mut(k);
            for l in 0..self.size {
                let coef = m[(k, l)];
                if coef == T::zero() {
                    continue;
                }
                for (d, &s) in dst.iter_mut().zip(a.slice_data(l)) {
                    *d += coef * s;
                }
            }
        }
        Ok(out)
    }
}

/// Applies the cosine transform along mode 3.
pub fn transform_mode3<T: Scalar>(
    a: &Tensor3<T>,
    transform: &TubeTransform<T>,
    direction: Direction,
) -> Result<Tensor3<T>> {
    transform.apply(a, direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dct_order_one_and_two() {
        let c1 = dct_matrix::<f64>(1).unwrap();
        assert_eq!(c1[(0, 0)], 1.0);
        let c2 = dct_matrix::<f64>(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = Matrix::from_rows(&[vec![h, h], vec![h, -h]]).unwrap();
        assert!(c2.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn dct_is_orthogonal() {
        let c = dct_matrix::<f64>(8).unwrap();
        let ctc = c.transpose().matmul(&c).unwrap();
        assert!(ctc.max_abs_diff(&Matrix::identity(8)) < 1e-12);
    }

    #[test]
    fn dct_rejects_zero_order() {
        assert!(matches!(dct_matrix::<f64>(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn transform_of_order_one_is_identity() {
        let t = make_transform::<f64>(1).unwrap();
        assert_eq!(t.forward()[(0, 0)], 1.0);
        assert_eq!(t.inverse()[(0, 0)], 1.0);
    }

    #[test]
    fn transform_inverse_contract() {
        for n in 1..=9 {
            let t = make_transform::<f64>(n).unwrap();
            let prod = t.forward().matmul(t.inverse()).unwrap();
            assert!(prod.max_abs_diff(&Matrix::identity(n)) < 1e-12, "n3={n}");
        }
    }

    #[test]
    fn order_three_transform_is_integral() {
        // W⁻¹C(I+Z) for n=3 works out to small integers.
        let t = make_transform::<f64>(3).unwrap();
        let expect = Matrix::from_rows(&[vec![1.0, 2.0, 2.0], vec![1.0, 1.0, -1.0], vec![1.0, -1.0, -1.0]]).unwrap();
        assert!(t.forward().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn adjoint_pair_is_inverse_pair() {
        let t = make_transform::<f64>(4).unwrap().adjoint();
        let prod = t.forward().matmul(t.inverse()).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn mode3_size_mismatch() {
        let t = make_transform::<f64>(3).unwrap();
        let a = Tensor3::<f64>::zeros(2, 2, 4).unwrap();
        assert!(matches!(
            transform_mode3(&a, &t, Direction::Forward),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
