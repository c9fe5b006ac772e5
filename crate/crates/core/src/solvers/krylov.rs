//! Arnoldi and Golub-Kahan processes over a tensor operator.

use crate::basis::TensorBasis;
use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

use super::operator::{expect_dims, LinearTensorOperator};

/// Relative size below which a new Krylov direction counts as zero.
pub const BREAKDOWN_TOL: f64 = 1e-14;

pub(crate) fn breakdown_threshold<T: Scalar>(reference: T) -> T {
    let rel = T::lit(BREAKDOWN_TOL).max(T::epsilon() * T::lit(16.0));
    rel * reference
}

/// One pass of classical Gram-Schmidt against `basis`, accumulating the
/// coefficients into `coeffs`.
fn reorthogonalize<T: Scalar>(w: &mut Tensor3<T>, basis: &[Tensor3<T>], mut coeffs: Option<&mut [T]>) -> Result<()> {
    let c: Vec<T> = basis.iter().map(|v| v.inner(w)).collect::<Result<_>>()?;
    for (i, (v, &ci)) in basis.iter().zip(&c).enumerate() {
        w.axpy(-ci, v)?;
        if let Some(h) = coeffs.as_deref_mut() {
            h[i] += ci;
        }
    }
    Ok(())
}

fn finite_or_abort<T: Scalar>(x: &Tensor3<T>, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::SolverAbort(format!("non-finite values in {what}")))
    }
}

#[derive(Clone, Debug)]
pub struct ArnoldiDecomposition<T> {
    /// `V_1 … V_{k+1}`, or `V_1 … V_k` after a breakdown at step `k`.
    pub basis: TensorBasis<T>,
    /// `(k+1) × k` upper Hessenberg matrix.
    pub hessenberg: Matrix<T>,
    /// Norm of the seed.
    pub beta: T,
    pub breakdown_step: Option<usize>,
}

impl<T: Scalar> ArnoldiDecomposition<T> {
    /// Number of completed steps `k`.
    pub fn steps(&self) -> usize {
        self.hessenberg.cols()
    }

    /// The square `k × k` leading block `H_k`.
    pub fn square_hessenberg(&self) -> Matrix<T> {
        let k = self.steps();
        Matrix::from_fn(k, k, |i, j| self.hessenberg[(i, j)])
    }
}

/// `m` steps of Arnoldi with modified Gram-Schmidt.
///
/// A second classical pass is made whenever orthogonalization removes more
/// than `1 − 1/√2` of a direction's norm.
pub fn arnoldi<T, O>(op: &O, seed: &Tensor3<T>, m: usize) -> Result<ArnoldiDecomposition<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
{
    if !op.is_square() {
        return Err(Error::InvalidArgument(format!(
            "Arnoldi needs a square operator, got {} -> {}",
            op.domain_dims(),
            op.range_dims()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("Arnoldi needs m >= 1".into()));
    }
    expect_dims(seed, op.domain_dims(), "arnoldi")?;
    let beta = seed.fro_norm();
    if beta == T::zero() {
        return Err(Error::ZeroTensor("Arnoldi seed"));
    }
    let mut blocks = vec![seed.scaled(T::one() / beta)];
    let mut h = Matrix::zeros(m + 1, m);
    let mut breakdown = None;
    let root_half = T::lit(std::f64::consts::FRAC_1_SQRT_2);

    for j in 0..m {
        let mut w = op.apply(&blocks[j])?;
        finite_or_abort(&w, "Arnoldi step")?;
        let pre = w.fro_norm();
        for (i, v) in blocks.iter().enumerate() {
            let hij = v.inner(&w)?;
            h[(i, j)] = hij;
            w.axpy(-hij, v)?;
        }
        if w.fro_norm() < root_half * pre {
            let mut extra = vec![T::zero(); j + 1];
            reorthogonalize(&mut w, &blocks, Some(&mut extra))?;
            for (i, e) in extra.into_iter().enumerate() {
                h[(i, j)] += e;
            }
        }
        let norm = w.fro_norm();
        if norm <= breakdown_threshold(pre) {
            h[(j + 1, j)] = T::zero();
            breakdown = Some(j + 1);
            h = Matrix::from_fn(j + 2, j + 1, |r, c| h[(r, c)]);
            break;
        }
        h[(j + 1, j)] = norm;
        w.scale_mut(T::one() / norm);
        blocks.push(w);
    }
    Ok(ArnoldiDecomposition {
        basis: TensorBasis::new(blocks)?,
        hessenberg: h,
        beta,
        breakdown_step: breakdown,
    })
}

#[derive(Clone, Debug)]
pub struct BidiagDecomposition<T> {
    /// `U_1 … U_{k+1}` (only `U_1 … U_k` after a β breakdown at step `k`).
    pub u_basis: TensorBasis<T>,
    /// `V_1 … V_k`, plus `V_{k+1}` when it was formed.
    pub v_basis: TensorBasis<T>,
    /// `(k+1) × k` lower bidiagonal matrix, diagonal `α`, subdiagonal `β`.
    pub bidiag: Matrix<T>,
    /// `‖C‖_F`.
    pub beta1: T,
    pub breakdown_step: Option<usize>,
}

impl<T: Scalar> BidiagDecomposition<T> {
    pub fn steps(&self) -> usize {
        self.bidiag.cols()
    }

    /// Diagonal entries `α_1 … α_k`.
    pub fn alphas(&self) -> Vec<T> {
        (0..self.steps()).map(|j| self.bidiag[(j, j)]).collect()
    }

    /// Subdiagonal entries `β_2 … β_{k+1}`.
    pub fn betas(&self) -> Vec<T> {
        (0..self.steps()).map(|j| self.bidiag[(j + 1, j)]).collect()
    }
}

/// Incremental Golub-Kahan bidiagonalization, shared by the GK and LSQR
/// solvers.
pub(crate) struct Bidiagonalizer<'a, T, O: ?Sized> {
    op: &'a O,
    reorthogonalize: bool,
    pub u: Vec<Tensor3<T>>,
    pub v: Vec<Tensor3<T>>,
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub beta1: T,
}

/// Outcome of one bidiagonalization step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum GkStep {
    /// `β_{j+1}` and `α_{j+1}` are both nonzero.
    Continue,
    /// `β_{j+1} = 0`: the range part is exhausted.
    BetaBreakdown,
    /// `α_{j+1} = 0`: the next right vector vanished.
    AlphaBreakdown,
}

impl<'a, T: Scalar, O: LinearTensorOperator<T> + ?Sized> Bidiagonalizer<'a, T, O> {
    /// Forms `β₁`, `U₁`, `α₁`, `V₁`. Returns `None` for `α₁ = 0`
    /// (`C` orthogonal to the range).
    pub fn start(op: &'a O, c: &Tensor3<T>, reorthogonalize: bool) -> Result<(Self, bool)> {
        expect_dims(c, op.range_dims(), "golub_kahan")?;
        let beta1 = c.fro_norm();
        if beta1 == T::zero() {
            return Err(Error::ZeroTensor("Golub-Kahan right-hand side"));
        }
        let u1 = c.scaled(T::one() / beta1);
        let mut v = op.apply_adjoint(&u1)?;
        finite_or_abort(&v, "Golub-Kahan start")?;
        let alpha1 = v.fro_norm();
        let mut s = Self {
            op,
            reorthogonalize,
            u: vec![u1],
            v: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            beta1,
        };
        if alpha1 == T::zero() {
            return Ok((s, false));
        }
        v.scale_mut(T::one() / alpha1);
        s.alphas.push(alpha1);
        s.v.push(v);
        Ok((s, true))
    }

    /// Step `j` (zero-based): forms `β_{j+1}, U_{j+1}` then `α_{j+1}, V_{j+1}`.
    pub fn step(&mut self) -> Result<GkStep> {
        let j = self.v.len() - 1;
        let root_half = T::lit(std::f64::consts::FRAC_1_SQRT_2);

        let mut u = self.op.apply(&self.v[j])?;
        finite_or_abort(&u, "Golub-Kahan step")?;
        let pre = u.fro_norm();
        u.axpy(-self.alphas[j], &self.u[j])?;
        if self.reorthogonalize && u.fro_norm() < root_half * pre {
            reorthogonalize(&mut u, &self.u, None)?;
        }
        let beta = u.fro_norm();
        if beta <= breakdown_threshold(pre) {
            self.betas.push(T::zero());
            return Ok(GkStep::BetaBreakdown);
        }
        u.scale_mut(T::one() / beta);
        self.betas.push(beta);
        self.u.push(u);

        let mut v = self.op.apply_adjoint(&self.u[j + 1])?;
        finite_or_abort(&v, "Golub-Kahan step")?;
        let pre = v.fro_norm();
        v.axpy(-beta, &self.v[j])?;
        if self.reorthogonalize && v.fro_norm() < root_half * pre {
            reorthogonalize(&mut v, &self.v, None)?;
        }
        let alpha = v.fro_norm();
        if alpha <= breakdown_threshold(pre) {
            return Ok(GkStep::AlphaBreakdown);
        }
        v.scale_mut(T::one() / alpha);
        self.alphas.push(alpha);
        self.v.push(v);
        Ok(GkStep::Continue)
    }
}

/// `m` steps of Golub-Kahan bidiagonalization seeded with `C`.
pub fn golub_kahan<T, O>(op: &O, c: &Tensor3<T>, m: usize) -> Result<BidiagDecomposition<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
{
    if m == 0 {
        return Err(Error::InvalidArgument("Golub-Kahan needs m >= 1".into()));
    }
    let (mut gk, ok) = Bidiagonalizer::start(op, c, true)?;
    if !ok {
        return Err(Error::SolverAbort(
            "right-hand side is orthogonal to the operator range (alpha_1 = 0)".into(),
        ));
    }
    let mut breakdown = None;
    for j in 0..m {
        match gk.step()? {
            GkStep::Continue => {}
            GkStep::BetaBreakdown | GkStep::AlphaBreakdown => {
                breakdown = Some(j + 1);
                break;
            }
        }
    }
    let k = gk.betas.len();
    let mut bidiag = Matrix::zeros(k + 1, k);
    for j in 0..k {
        bidiag[(j, j)] = gk.alphas[j];
        bidiag[(j + 1, j)] = gk.betas[j];
    }
    let beta1 = gk.beta1;
    Ok(BidiagDecomposition {
        u_basis: TensorBasis::new(gk.u)?,
        v_basis: TensorBasis::new(gk.v)?,
        bidiag,
        beta1,
        breakdown_step: breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::diamond;
    use crate::solvers::operator::{IdentityOperator, LeftProductOperator};
    use crate::tensor::Dims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_breaks_down_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seed = Tensor3::<f64>::random_normal(3, 2, 3, &mut rng).unwrap();
        let id = IdentityOperator::new(seed.dims());
        let d = arnoldi(&id, &seed, 4).unwrap();
        assert_eq!(d.breakdown_step, Some(1));
        assert_eq!(d.hessenberg.rows(), 2);
        assert!((d.hessenberg[(0, 0)] - 1.0).abs() < 1e-14);
        assert_eq!(d.hessenberg[(1, 0)], 0.0);
        assert_eq!(d.basis.len(), 1);
    }

    #[test]
    fn arnoldi_relation_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = Tensor3::<f64>::random_normal(6, 6, 3, &mut rng).unwrap();
        let op = LeftProductOperator::new(a, 2).unwrap();
        let seed = Tensor3::random_normal(6, 2, 3, &mut rng).unwrap();
        let d = arnoldi(&op, &seed, 4).unwrap();
        assert_eq!(d.basis.len(), 5);
        let vm = d.basis.truncated(4);
        let lhs = vm.map(|v| op.apply(v)).unwrap();
        let rhs = d.basis.combine_matrix(&d.hessenberg).unwrap();
        for (x, y) in lhs.blocks().iter().zip(rhs.blocks()) {
            assert!(x.sub(y).unwrap().fro_norm() < 1e-10);
        }
        let g = diamond(&d.basis, &d.basis).unwrap();
        assert!(g.max_abs_diff(&Matrix::identity(5)) < 1e-12);
        for i in 2..5 {
            for j in 0..i - 1 {
                assert_eq!(d.hessenberg[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn arnoldi_rejects_bad_input() {
        let id = IdentityOperator::new(Dims::new(2, 2, 2));
        let z = Tensor3::<f64>::zeros(2, 2, 2).unwrap();
        assert!(matches!(arnoldi(&id, &z, 3), Err(Error::ZeroTensor(_))));
        let rect = LeftProductOperator::new(Tensor3::<f64>::filled(3, 2, 2, 1.0).unwrap(), 2).unwrap();
        let s = Tensor3::filled(2, 2, 2, 1.0).unwrap();
        assert!(arnoldi(&rect, &s, 2).is_err());
    }

    #[test]
    fn golub_kahan_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = Tensor3::<f64>::random_normal(3, 2, 3, &mut rng).unwrap();
        let c = c.scaled(1.0 / c.fro_norm());
        let id = IdentityOperator::new(c.dims());
        let d = golub_kahan(&id, &c, 3).unwrap();
        assert!((d.alphas()[0] - 1.0).abs() < 1e-14);
        assert_eq!(d.betas()[0], 0.0);
        assert_eq!(d.breakdown_step, Some(1));
    }

    #[test]
    fn golub_kahan_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = Tensor3::<f64>::random_normal(6, 5, 3, &mut rng).unwrap();
        let op = LeftProductOperator::new(a, 2).unwrap();
        let c = Tensor3::random_normal(6, 2, 3, &mut rng).unwrap();
        let d = golub_kahan(&op, &c, 4).unwrap();
        assert_eq!(d.steps(), 4);
        let lhs = d.v_basis.truncated(4).map(|v| op.apply(v)).unwrap();
        let rhs = d.u_basis.combine_matrix(&d.bidiag).unwrap();
        for (x, y) in lhs.blocks().iter().zip(rhs.blocks()) {
            assert!(x.sub(y).unwrap().fro_norm() < 1e-10);
        }
        let mut e1 = vec![0.0; d.u_basis.len()];
        e1[0] = d.beta1;
        assert!(d.u_basis.combine(&e1).unwrap().relative_diff(&c).unwrap() < 1e-12);
        let gu = diamond(&d.u_basis, &d.u_basis).unwrap();
        assert!(gu.max_abs_diff(&Matrix::identity(d.u_basis.len())) < 1e-10);
    }
}
