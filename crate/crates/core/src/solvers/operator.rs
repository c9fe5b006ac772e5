use rand::Rng;

use crate::error::{mismatch, Error, Result};
use crate::product::{facewise_product, SliceOp};
use crate::scalar::Scalar;
use crate::tensor::{Dims, Tensor3};
use crate::transform::{make_transform, Direction, TubeTransform};

/// A linear map between tensor spaces together with its adjoint.
pub trait LinearTensorOperator<T: Scalar> {
    fn domain_dims(&self) -> Dims;
    fn range_dims(&self) -> Dims;
    fn apply(&self, x: &Tensor3<T>) -> Result<Tensor3<T>>;
    fn apply_adjoint(&self, y: &Tensor3<T>) -> Result<Tensor3<T>>;

    fn is_square(&self) -> bool {
        self.domain_dims() == self.range_dims()
    }
}

impl<T: Scalar, O: LinearTensorOperator<T> + ?Sized> LinearTensorOperator<T> for &O {
    fn domain_dims(&self) -> Dims {
        (**self).domain_dims()
    }
    fn range_dims(&self) -> Dims {
        (**self).range_dims()
    }
    fn apply(&self, x: &Tensor3<T>) -> Result<Tensor3<T>> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &Tensor3<T>) -> Result<Tensor3<T>> {
        (**self).apply_adjoint(y)
    }
}

/// How an operator built from c-products evaluates its adjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AdjointRule {
    /// The Frobenius adjoint: transposed slices under the adjoint transform pair.
    #[default]
    Exact,
    /// `Aᵀ ⋆c Y` (and `⋆c Bᵀ`). Differs from the adjoint when `n3 > 1`.
    TransposeProduct,
    /// `A ⋆c Y` with no transpose at all; a negative control.
    Untransposed,
}

/// `X ↦ A ⋆c X` for `X` of shape `n2 × s × n3`.
#[derive(Clone, Debug)]
pub struct LeftProductOperator<T> {
    a: Tensor3<T>,
    a_hat: Tensor3<T>,
    transform: TubeTransform<T>,
    adjoint_transform: TubeTransform<T>,
    cols: usize,
    rule: AdjointRule,
}

impl<T: Scalar> LeftProductOperator<T> {
    pub fn new(a: Tensor3<T>, cols: usize) -> Result<Self> {
        Self::with_rule(a, cols, AdjointRule::Exact)
    }

    pub fn with_rule(a: Tensor3<T>, cols: usize, rule: AdjointRule) -> Result<Self> {
        if cols == 0 {
            return Err(Error::InvalidDimension("operator with zero columns".into()));
        }
        if rule == AdjointRule::Untransposed && a.n1() != a.n2() {
            return Err(Error::InvalidArgument(
                "untransposed adjoint needs square slices".into(),
            ));
        }
        let transform = make_transform(a.n3())?;
        let a_hat = transform.apply(&a, Direction::Forward)?;
        let adjoint_transform = transform.adjoint();
        Ok(Self {
            a,
            a_hat,
            transform,
            adjoint_transform,
            cols,
            rule,
        })
    }

    pub fn tensor(&self) -> &Tensor3<T> {
        &self.a
    }
}

impl<T: Scalar> LinearTensorOperator<T> for LeftProductOperator<T> {
    fn domain_dims(&self) -> Dims {
        Dims::new(self.a.n2(), self.cols, self.a.n3())
    }

    fn range_dims(&self) -> Dims {
        Dims::new(self.a.n1(), self.cols, self.a.n3())
    }

    fn apply(&self, x: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(x, self.domain_dims(), "LeftProductOperator::apply")?;
        let x_hat = self.transform.apply(x, Direction::Forward)?;
        let y_hat = facewise_product(&self.a_hat, SliceOp::Plain, &x_hat, SliceOp::Plain)?;
        self.transform.apply(&y_hat, Direction::Inverse)
    }

    fn apply_adjoint(&self, y: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(y, self.range_dims(), "LeftProductOperator::apply_adjoint")?;
        let (t, op) = match self.rule {
            AdjointRule::Exact => (&self.adjoint_transform, SliceOp::Transposed),
            AdjointRule::TransposeProduct => (&self.transform, SliceOp::Transposed),
            AdjointRule::Untransposed => (&self.transform, SliceOp::Plain),
        };
        let y_hat = t.apply(y, Direction::Forward)?;
        let x_hat = facewise_product(&self.a_hat, op, &y_hat, SliceOp::Plain)?;
        t.apply(&x_hat, Direction::Inverse)
    }
}

/// `X ↦ A ⋆c X ⋆c B` for `A: n1×n2×p`, `B: s1×s2×p`, `X: n2×s1×p`.
#[derive(Clone, Debug)]
pub struct SandwichOperator<T> {
    a: Tensor3<T>,
    b: Tensor3<T>,
    a_hat: Tensor3<T>,
    b_hat: Tensor3<T>,
    transform: TubeTransform<T>,
    adjoint_transform: TubeTransform<T>,
    rule: AdjointRule,
}

impl<T: Scalar> SandwichOperator<T> {
    pub fn new(a: Tensor3<T>, b: Tensor3<T>) -> Result<Self> {
        Self::with_rule(a, b, AdjointRule::Exact)
    }

    pub fn with_rule(a: Tensor3<T>, b: Tensor3<T>, rule: AdjointRule) -> Result<Self> {
        if a.n3() != b.n3() {
            return Err(mismatch(
                "SandwichOperator",
                format!("{} and {} have different tube lengths", a.dims(), b.dims()),
            ));
        }
        if rule == AdjointRule::Untransposed && (a.n1() != a.n2() || b.n1() != b.n2()) {
            return Err(Error::InvalidArgument(
                "untransposed adjoint needs square slices".into(),
            ));
        }
        let transform = make_transform(a.n3())?;
        let a_hat = transform.apply(&a, Direction::Forward)?;
        let b_hat = transform.apply(&b, Direction::Forward)?;
        let adjoint_transform = transform.adjoint();
        Ok(Self {
            a,
            b,
            a_hat,
            b_hat,
            transform,
            adjoint_transform,
            rule,
        })
    }

    pub fn left(&self) -> &Tensor3<T> {
        &self.a
    }

    pub fn right(&self) -> &Tensor3<T> {
        &self.b
    }
}

impl<T: Scalar> LinearTensorOperator<T> for SandwichOperator<T> {
    fn domain_dims(&self) -> Dims {
        Dims::new(self.a.n2(), self.b.n1(), self.a.n3())
    }

    fn range_dims(&self) -> Dims {
        Dims::new(self.a.n1(), self.b.n2(), self.a.n3())
    }

    fn apply(&self, x: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(x, self.domain_dims(), "SandwichOperator::apply")?;
        let x_hat = self.transform.apply(x, Direction::Forward)?;
        let ax = facewise_product(&self.a_hat, SliceOp::Plain, &x_hat, SliceOp::Plain)?;
        let axb = facewise_product(&ax, SliceOp::Plain, &self.b_hat, SliceOp::Plain)?;
        self.transform.apply(&axb, Direction::Inverse)
    }

    fn apply_adjoint(&self, y: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(y, self.range_dims(), "SandwichOperator::apply_adjoint")?;
        let (t, op) = match self.rule {
            AdjointRule::Exact => (&self.adjoint_transform, SliceOp::Transposed),
            AdjointRule::TransposeProduct => (&self.transform, SliceOp::Transposed),
            AdjointRule::Untransposed => (&self.transform, SliceOp::Plain),
        };
        let y_hat = t.apply(y, Direction::Forward)?;
        let ay = facewise_product(&self.a_hat, op, &y_hat, SliceOp::Plain)?;
        let ayb = facewise_product(&ay, SliceOp::Plain, &self.b_hat, op)?;
        t.apply(&ayb, Direction::Inverse)
    }
}

/// The identity map on tensors of one shape.
#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator {
    dims: Dims,
}

impl IdentityOperator {
    pub fn new(dims: Dims) -> Self {
        Self { dims }
    }
}

impl<T: Scalar> LinearTensorOperator<T> for IdentityOperator {
    fn domain_dims(&self) -> Dims {
        self.dims
    }
    fn range_dims(&self) -> Dims {
        self.dims
    }
    fn apply(&self, x: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(x, self.dims, "IdentityOperator::apply")?;
        Ok(x.clone())
    }
    fn apply_adjoint(&self, y: &Tensor3<T>) -> Result<Tensor3<T>> {
        expect_dims(y, self.dims, "IdentityOperator::apply_adjoint")?;
        Ok(y.clone())
    }
}

/// Largest `|⟨ℳX, Y⟩ − ⟨X, ℳᵀY⟩| / (‖ℳX‖·‖Y‖)` over random standard-normal pairs.
pub fn adjoint_check<T, O, R>(op: &O, trials: usize, rng: &mut R) -> Result<T>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
    R: Rng + ?Sized,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("adjoint_check needs at least one trial".into()));
    }
    let (d, r) = (op.domain_dims(), op.range_dims());
    let mut worst = T::zero();
    for _ in 0..trials {
        let x = Tensor3::random_normal(d.n1, d.n2, d.n3, rng)?;
        let y = Tensor3::random_normal(r.n1, r.n2, r.n3, rng)?;
        let mx = op.apply(&x)?;
        let mty = op.apply_adjoint(&y)?;
        let lhs = mx.inner(&y)?;
        let rhs = x.inner(&mty)?;
        let scale = mx.fro_norm() * y.fro_norm();
        let defect = if scale > T::zero() {
            (lhs - rhs).abs() / scale
        } else {
            (lhs - rhs).abs()
        };
        worst = worst.max(defect);
    }
    Ok(worst)
}

pub(crate) fn expect_dims<T: Scalar>(x: &Tensor3<T>, dims: Dims, op: &'static str) -> Result<()> {
    if x.dims() != dims {
        return Err(mismatch(op, format!("expected {dims}, got {}", x.dims())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{cosine_product, cosine_product_adjoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn left_product_matches_cosine_product() {
        let mut r = rng(1);
        let a = Tensor3::<f64>::random_normal(4, 3, 3, &mut r).unwrap();
        let x = Tensor3::random_normal(3, 2, 3, &mut r).unwrap();
        let op = LeftProductOperator::new(a.clone(), 2).unwrap();
        let y = op.apply(&x).unwrap();
        assert!(y.relative_diff(&cosine_product(&a, &x).unwrap()).unwrap() < 1e-13);
        let z = Tensor3::random_normal(4, 2, 3, &mut r).unwrap();
        let adj = op.apply_adjoint(&z).unwrap();
        assert!(adj.relative_diff(&cosine_product_adjoint(&a, &z).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn exact_adjoints_pass_the_check() {
        let mut r = rng(2);
        let a = Tensor3::<f64>::random_normal(5, 4, 3, &mut r).unwrap();
        let b = Tensor3::random_normal(2, 3, 3, &mut r).unwrap();
        let left = LeftProductOperator::new(a.clone(), 2).unwrap();
        assert!(adjoint_check(&left, 5, &mut r).unwrap() < 1e-12);
        let sandwich = SandwichOperator::new(a, b).unwrap();
        assert!(adjoint_check(&sandwich, 5, &mut r).unwrap() < 1e-12);
        let id = IdentityOperator::new(Dims::new(3, 2, 4));
        assert!(LinearTensorOperator::<f64>::is_square(&id));
        assert!(adjoint_check::<f64, _, _>(&id, 3, &mut r).unwrap() < 1e-15);
    }

    #[test]
    fn transposed_product_is_not_the_adjoint() {
        let mut r = rng(3);
        let a = Tensor3::<f64>::random_normal(4, 4, 3, &mut r).unwrap();
        let op = LeftProductOperator::with_rule(a.clone(), 2, AdjointRule::TransposeProduct).unwrap();
        assert!(adjoint_check(&op, 10, &mut r).unwrap() > 1e-3);
        let wrong = LeftProductOperator::with_rule(a, 2, AdjointRule::Untransposed).unwrap();
        assert!(adjoint_check(&wrong, 10, &mut r).unwrap() > 1e-3);
    }

    #[test]
    fn transposed_product_is_the_adjoint_for_single_slices() {
        let mut r = rng(4);
        let a = Tensor3::<f64>::random_normal(4, 3, 1, &mut r).unwrap();
        let op = LeftProductOperator::with_rule(a, 2, AdjointRule::TransposeProduct).unwrap();
        assert!(adjoint_check(&op, 5, &mut r).unwrap() < 1e-13);
    }

    #[test]
    fn dimension_errors() {
        let a = Tensor3::<f64>::zeros(3, 2, 2).unwrap();
        let op = LeftProductOperator::new(a, 4).unwrap();
        assert!(op.apply(&Tensor3::zeros(3, 4, 2).unwrap()).is_err());
        assert!(LeftProductOperator::new(Tensor3::<f64>::zeros(3, 2, 2).unwrap(), 0).is_err());
        let b = Tensor3::<f64>::zeros(2, 2, 3).unwrap();
        assert!(SandwichOperator::new(Tensor3::<f64>::zeros(2, 2, 2).unwrap(), b).is_err());
    }
}
