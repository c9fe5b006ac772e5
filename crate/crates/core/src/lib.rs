//! Third-order tensor linear algebra under the cosine tensor product
//! (c-product), regularized tensor Krylov solvers built on it, and a
//! color-image blur model for deblurring experiments.
//!
//! The algebra is generic over the real scalar type ([`Scalar`] covers `f32`
//! and `f64`); the aliases at the crate root fix it to `f64`, which is what
//! the solvers and imaging pipeline use by default.
//!
//! ```
//! use dctensor::{cosine_product, identity_tensor, Tensor};
//!
//! let a = Tensor::from_fn(2, 2, 3, |i, j, k| (i + 2 * j + k) as f64).unwrap();
//! let id = identity_tensor::<f64>(2, 3).unwrap();
//! let same = cosine_product(&a, &id).unwrap();
//! assert!(same.relative_diff(&a).unwrap() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails the same checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod dense;
pub mod error;
pub mod imaging;
pub mod io;
pub mod oracle;
pub mod product;
pub mod regularization;
pub mod scalar;
pub mod solvers;
pub mod tensor;
pub mod transform;

pub use basis::{diamond, TensorBasis};
pub use dense::Matrix;
pub use error::{Error, Result};
pub use oracle::{mat, oracle_product, ten};
pub use product::{cosine_product, cosine_product_adjoint, identity_tensor};
pub use scalar::Scalar;
pub use tensor::{Dims, Tensor3};
pub use transform::{dct_matrix, make_transform, transform_mode3, Direction, TubeTransform};

/// Double-precision tensor.
pub type Tensor = Tensor3<f64>;
/// Single-precision tensor.
pub type Tensor32 = Tensor3<f32>;
/// Double-precision tensor basis.
pub type Basis = TensorBasis<f64>;
/// Double-precision dense matrix.
pub type Mat = Matrix<f64>;
/// Double-precision cosine tube transform.
pub type Transform = TubeTransform<f64>;
