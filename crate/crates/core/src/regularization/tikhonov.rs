use crate::dense::{lstsq, svd, Matrix, Svd};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `min ‖β e₁ − M y‖² + λ²‖y‖²` for a small (m+1)×m or m×m matrix `M`.
#[derive(Clone, Debug)]
pub struct ProjectedProblem<T> {
    matrix: Matrix<T>,
    rhs_scale: T,
}

impl<T: Scalar> ProjectedProblem<T> {
    pub fn new(matrix: Matrix<T>, rhs_scale: T) -> Result<Self> {
        if !matrix.is_finite() || !rhs_scale.is_finite() {
            return Err(Error::NonFinite("projected problem"));
        }
        if rhs_scale <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "projected right-hand side scale must be positive, got {rhs_scale}"
            )));
        }
        if matrix.cols() == 0 || matrix.rows() < matrix.cols() {
            return Err(Error::InvalidDimension(format!(
                "projected matrix must be tall, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, rhs_scale })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn rhs_scale(&self) -> T {
        self.rhs_scale
    }

    /// `β e₁` with one entry per matrix row.
    pub fn rhs(&self) -> Vec<T> {
        let mut b = vec![T::zero(); self.matrix.rows()];
        b[0] = self.rhs_scale;
        b
    }
}

/// Full SVD of a small projected matrix.
pub fn small_svd<T: Scalar>(m: &Matrix<T>) -> Result<Svd<T>> {
    if m.cols() == 0 || m.rows() == 0 {
        return Err(Error::InvalidDimension("empty matrix".into()));
    }
    svd(m)
}

/// Tikhonov solution through the stacked least-squares system
/// `[M; λI] y ≈ [β e₁; 0]`.
pub fn tikhonov_solve<T: Scalar>(p: &ProjectedProblem<T>, lambda: T) -> Result<Vec<T>> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    let m = p.matrix();
    let (rows, cols) = (m.rows(), m.cols());
    if lambda == T::zero() {
        return lstsq(m, &p.rhs());
    }
    let aug = Matrix::from_fn(rows + cols, cols, |i, j| {
        if i < rows {
            m[(i, j)]
        } else if i - rows == j {
            lambda
        } else {
            T::zero()
        }
    });
    let mut rhs = vec![T::zero(); rows + cols];
    rhs[0] = p.rhs_scale();
    lstsq(&aug, &rhs)
}
