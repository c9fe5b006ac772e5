//! Ordered families of equally shaped tensors (Krylov bases) and the
//! operations that couple them with ordinary vectors and matrices.

use crate::dense::Matrix;
use crate::error::{mismatch, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Dims, Tensor3};

#[derive(Clone, Debug)]
pub struct TensorBasis<T> {
    dims: Dims,
    blocks: Vec<Tensor3<T>>,
}

impl<T: Scalar> TensorBasis<T> {
    pub fn new(blocks: Vec<Tensor3<T>>) -> Result<Self> {
        let dims = blocks
            .first()
            .map(Tensor3::dims)
            .ok_or_else(|| Error::InvalidDimension("empty tensor basis".into()))?;
        if let Some(bad) = blocks.iter().find(|b| b.dims() != dims) {
            return Err(mismatch(
                "TensorBasis::new",
                format!("block {} differs from {dims}", bad.dims()),
            ));
        }
        Ok(Self { dims, blocks })
    }

    /// An empty basis that will hold blocks of the given shape.
    pub fn with_dims(dims: Dims) -> Self {
        Self {
            dims,
            blocks: Vec::new(),
        }
    }

    pub fn push(&mut self, block: Tensor3<T>) -> Result<()> {
        if block.dims() != self.dims {
            return Err(mismatch(
                "TensorBasis::push",
                format!("{} into a basis of {}", block.dims(), self.dims),
            ));
        }
        self.blocks.push(block);
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Tensor3<T>] {
        &self.blocks
    }

    pub fn get(&self, i: usize) -> &Tensor3<T> {
        &self.blocks[i]
    }

    /// The first `m` blocks.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            dims: self.dims,
            blocks: self.blocks[..m.min(self.blocks.len())].to_vec(),
        }
    }

    pub fn into_blocks(self) -> Vec<Tensor3<T>> {
        self.blocks
    }

    /// `Σ_j y_j · V_j`.
    pub fn combine(&self, y: &[T]) -> Result<Tensor3<T>> {
        if y.len() != self.blocks.len() {
            return Err(mismatch(
                "basis_combine",
                format!("{} coefficients for {} blocks", y.len(), self.blocks.len()),
            ));
        }
        let mut out = Tensor3::from_raw(self.dims, vec![T::zero(); self.dims.len()]);
        for (&c, b) in y.iter().zip(&self.blocks) {
            if c != T::zero() {
                out.axpy(c, b)?;
            }
        }
        Ok(out)
    }

    /// Column-wise combination: block `j` of the result is `self ⊛ H(:, j)`.
    pub fn combine_matrix(&self, h: &Matrix<T>) -> Result<Self> {
        if h.rows() != self.blocks.len() {
            return Err(mismatch(
                "basis_combine",
                format!("{}-row coefficient matrix for {} blocks", h.rows(), self.blocks.len()),
            ));
        }
        let blocks = (0..h.cols())
            .map(|j| self.combine(h.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dims: self.dims,
            blocks,
        })
    }

    /// Applies `f` block by block.
    pub fn map(&self, f: impl Fn(&Tensor3<T>) -> Result<Tensor3<T>>) -> Result<Self> {
        Self::new(self.blocks.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

/// Diamond product: the p×ℓ matrix of block inner products `⟨A_i, B_j⟩`.
pub fn diamond<T: Scalar>(a: &TensorBasis<T>, b: &TensorBasis<T>) -> Result<Matrix<T>> {
    if a.dims() != b.dims() {
        return Err(mismatch("diamond", format!("blocks {} vs {}", a.dims(), b.dims())));
    }
    let mut out = Matrix::zeros(a.len(), b.len());
    for (i, ai) in a.blocks().iter().enumerate() {
        for (j, bj) in b.blocks().iter().enumerate() {
            out[(i, j)] = ai.inner(bj)?;
        }
    }
    Ok(out)
}

/// Largest absolute difference between two bases, block by block.
pub fn basis_max_diff<T: Scalar>(a: &TensorBasis<T>, b: &TensorBasis<T>) -> Result<T> {
    if a.len() != b.len() || a.dims() != b.dims() {
        return Err(mismatch("basis_max_diff", "basis shapes differ"));
    }
    let mut worst = T::zero();
    for (x, y) in a.blocks().iter().zip(b.blocks()) {
        worst = worst.max(x.sub(y)?.fro_norm());
    }
    Ok(worst)
}
