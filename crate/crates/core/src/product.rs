//! The c-product and its facewise kernels.

use crate::dense::{gemm_acc, gemm_nt_acc, gemm_tn_acc};
use crate::error::{mismatch, Result};
use crate::scalar::Scalar;
use crate::tensor::{Dims, Tensor3};
use crate::transform::{make_transform, Direction, TubeTransform};

/// How each operand's frontal slices enter a facewise product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceOp {
    Plain,
    Transposed,
}

/// Facewise product `C(:,:,k) = op(A(:,:,k)) · op(B(:,:,k))` with no transform.
pub fn facewise_product<T: Scalar>(a: &Tensor3<T>, op_a: SliceOp, b: &Tensor3<T>, op_b: SliceOp) -> Result<Tensor3<T>> {
    let (ar, ac) = match op_a {
        SliceOp::Plain => (a.n1(), a.n2()),
        SliceOp::Transposed => (a.n2(), a.n1()),
    };
    let (br, bc) = match op_b {
        SliceOp::Plain => (b.n1(), b.n2()),
        SliceOp::Transposed => (b.n2(), b.n1()),
    };
    if ac != br || a.n3() != b.n3() {
        return Err(mismatch(
            "facewise_product",
            format!("{} ({op_a:?}) with {} ({op_b:?})", a.dims(), b.dims()),
        ));
    }
    let n3 = a.n3();
    let dims = Dims::new(ar, bc, n3);
    let mut data = vec![T::zero(); dims.len()];
    for k in 0..n3 {
        let c = &mut data[k * ar * bc..(k + 1) * ar * bc];
        let (sa, sb) = (a.slice_data(k), b.slice_data(k));
        match (op_a, op_b) {
            (SliceOp::Plain, SliceOp::Plain) => gemm_acc(ar, ac, bc, sa, sb, c),
            (SliceOp::Transposed, SliceOp::Plain) => gemm_tn_acc(ar, ac, bc, sa, sb, c),
            (SliceOp::Plain, SliceOp::Transposed) => gemm_nt_acc(ar, ac, bc, sa, sb, c),
            (SliceOp::Transposed, SliceOp::Transposed) => {
                let at = a.transpose();
                gemm_nt_acc(ar, ac, bc, at.slice_data(k), sb, c)
            }
        }
    }
    Ok(Tensor3::from_raw(dims, data))
}

/// The c-product `A ⋆c B` computed under a given transform.
pub fn cosine_product_with<T: Scalar>(
    a: &Tensor3<T>,
    b: &Tensor3<T>,
    transform: &TubeTransform<T>,
) -> Result<Tensor3<T>> {
    check_conformable(a, b, "cosine_product")?;
    let a_hat = transform.apply(a, Direction::Forward)?;
    let b_hat = transform.apply(b, Direction::Forward)?;
    let c_hat = facewise_product(&a_hat, SliceOp::Plain, &b_hat, SliceOp::Plain)?;
    transform.apply(&c_hat, Direction::Inverse)
}

/// The c-product `A ⋆c B` of an n1×n2×n3 and an n2×m×n3 tensor.
pub fn cosine_product<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<Tensor3<T>> {
    check_conformable(a, b, "cosine_product")?;
    let t = make_transform(a.n3())?;
    cosine_product_with(a, b, &t)
}

/// Frobenius adjoint of `X ↦ A ⋆c X`, evaluated at `Y`.
///
/// The transform is not orthogonal, so this is not `Aᵀ ⋆c Y`: the transposed
/// slices of `Â` act under the adjoint transform pair `(M⁻ᵀ, Mᵀ)`.
pub fn cosine_product_adjoint<T: Scalar>(a: &Tensor3<T>, y: &Tensor3<T>) -> Result<Tensor3<T>> {
    if a.n1() != y.n1() || a.n3() != y.n3() {
        return Err(mismatch(
            "cosine_product_adjoint",
            format!("{} against {}", a.dims(), y.dims()),
        ));
    }
    let t = make_transform(a.n3())?;
    let a_hat = t.apply(a, Direction::Forward)?;
    let adj = t.adjoint();
    let y_hat = adj.apply(y, Direction::Forward)?;
    let x_hat = facewise_product(&a_hat, SliceOp::Transposed, &y_hat, SliceOp::Plain)?;
    adj.apply(&x_hat, Direction::Inverse)
}

/// The identity tensor: every frontal slice of its transform is `I_n`.
pub fn identity_tensor<T: Scalar>(n: usize, n3: usize) -> Result<Tensor3<T>> {
    let t = make_transform(n3)?;
    let mut stack = Tensor3::zeros(n, n, n3)?;
    for k in 0..n3 {
        for i in 0..n {
            stack.set(i, i, k, T::one());
        }
    }
    t.apply(&stack, Direction::Inverse)
}

fn check_conformable<T: Scalar>(a: &Tensor3<T>, b: &Tensor3<T>, op: &'static str) -> Result<()> {
    if a.n2() != b.n1() || a.n3() != b.n3() {
        return Err(mismatch(op, format!("{} times {}", a.dims(), b.dims())));
    }
    Ok(())
}
