//! Dense real third-order tensors.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::Matrix;
use crate::error::{mismatch, Error, Result};
use crate::scalar::Scalar;

/// Dimensions `(n1, n2, n3)` of a third-order tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Dims {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Self {
        Self { n1, n2, n3 }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn slice_len(&self) -> usize {
        self.n1 * self.n2
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

/// Dense real n1×n2×n3 tensor.
///
/// Entries are stored frontal slice by frontal slice; inside a slice the
/// n1×n2 panel is column-major, so `(i, j, k)` lives at
/// `i + n1·(j + n2·k)`.
#[derive(Clone, PartialEq)]
pub struct Tensor3<T> {
    dims: Dims,
    data: Vec<T>,
}

impl<T> fmt::Debug for Tensor3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Tensor3<T> {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        let dims = checked_dims(n1, n2, n3)?;
        Ok(Self {
            dims,
            data: vec![T::zero(); dims.len()],
        })
    }

    pub fn zeros_like(other: &Self) -> Self {
        Self {
            dims: other.dims,
            data: vec![T::zero(); other.data.len()],
        }
    }

    pub fn filled(n1: usize, n2: usize, n3: usize, value: T) -> Result<Self> {
        let mut t = Self::zeros(n1, n2, n3)?;
        t.data.fill(value);
        Ok(t)
    }

    /// Wraps slice-major, column-within-slice data.
    pub fn from_vec(n1: usize, n2: usize, n3: usize, data: Vec<T>) -> Result<Self> {
        let dims = checked_dims(n1, n2, n3)?;
        if data.len() != dims.len() {
            return Err(mismatch(
                "Tensor3::from_vec",
                format!("{} values for {dims}", data.len()),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Tensor3::from_vec"));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(n1: usize, n2: usize, n3: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        let mut t = Self::zeros(n1, n2, n3)?;
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    t.data[i + n1 * (j + n2 * k)] = f(i, j, k);
                }
            }
        }
        if t.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Tensor3::from_fn"));
        }
        Ok(t)
    }

    /// Stacks equally sized matrices as frontal slices.
    pub fn from_slices(slices: &[Matrix<T>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::InvalidDimension("no frontal slices".into()))?;
        let (n1, n2) = (first.rows(), first.cols());
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for s in slices {
            if (s.rows(), s.cols()) != (n1, n2) {
                return Err(mismatch("Tensor3::from_slices", "slice shapes differ"));
            }
            data.extend_from_slice(s.as_slice());
        }
        Self::from_vec(n1, n2, slices.len(), data)
    }

    /// Tensor with iid standard normal entries.
    /// Draws are made in `f64` and converted, so `f32` and `f64` tensors from
    /// the same generator state agree up to rounding.
    pub fn random_normal<R: Rng + ?Sized>(n1: usize, n2: usize, n3: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::zeros(n1, n2, n3)?;
        for v in &mut t.data {
            let z: f64 = StandardNormal.sample(rng);
            *v = T::lit(z);
        }
        Ok(t)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.dims.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.dims.n2
    }

    #[inline]
    pub fn n3(&self) -> usize {
        self.dims.n3
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        let d = self.dims;
        self.data[i + d.n1 * (j + d.n2 * k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: T) {
        let d = self.dims;
        self.data[i + d.n1 * (j + d.n2 * k)] = value;
    }

    /// Column-major panel of frontal slice `k`.
    #[inline]
    pub fn slice_data(&self, k: usize) -> &[T] {
        let len = self.dims.slice_len();
        &self.data[k * len..(k + 1) * len]
    }

    #[inline]
    pub(crate) fn slice_data_mut(&mut self, k: usize) -> &mut [T] {
        let len = self.dims.slice_len();
        &mut self.data[k * len..(k + 1) * len]
    }

    /// Frontal slice `k` as a matrix.
    pub fn frontal_slice(&self, k: usize) -> Matrix<T> {
        Matrix::from_col_major(self.n1(), self.n2(), self.slice_data(k).to_vec()).expect("slice length matches dims")
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn check_same_dims(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.dims != other.dims {
            return Err(mismatch(op, format!("{} vs {}", self.dims, other.dims)));
        }
        Ok(())
    }

    /// Frobenius inner product, summed in the spatial domain.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_dims(other, "inner")?;
        Ok(self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum())
    }

    pub fn fro_norm(&self) -> T {
        // Scaled accumulation keeps tiny and huge entries from under/overflowing.
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let inv = T::one() / scale;
        let s: T = self.data.iter().map(|&v| (v * inv) * (v * inv)).sum();
        scale * s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&v| v * alpha).collect(),
        }
    }

    pub fn scale_mut(&mut self, alpha: T) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    /// `self += alpha · x`.
    pub fn axpy(&mut self, alpha: T, x: &Self) -> Result<()> {
        self.check_same_dims(x, "axpy")?;
        for (a, &b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(T::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    /// Frontal-slice-wise transpose: `result(:,:,k) = self(:,:,k)ᵀ`.
    pub fn transpose(&self) -> Self {
        let Dims { n1, n2, n3 } = self.dims;
        let mut data = vec![T::zero(); self.data.len()];
        for k in 0..n3 {
            let src = self.slice_data(k);
            let dst = &mut data[k * n1 * n2..(k + 1) * n1 * n2];
            for j in 0..n2 {
                for i in 0..n1 {
                    dst[j + n2 * i] = src[i + n1 * j];
                }
            }
        }
        Self {
            dims: Dims::new(n2, n1, n3),
            data,
        }
    }

    /// `‖self − other‖_F / ‖other‖_F` (absolute difference if `other` is zero).
    pub fn relative_diff(&self, other: &Self) -> Result<T> {
        let diff = self.sub(other)?.fro_norm();
        let base = other.fro_norm();
        Ok(if base > T::zero() { diff / base } else { diff })
    }

    /// Converts between scalar types.
    pub fn cast<U: Scalar>(&self) -> Tensor3<U> {
        Tensor3 {
            dims: self.dims,
            data: self
                .data
                .iter()
                .map(|&v| U::from_f64(v.to_f64_lossy()).unwrap_or_else(U::nan))
                .collect(),
        }
    }

    pub(crate) fn from_raw(dims: Dims, data: Vec<T>) -> Self {
        debug_assert_eq!(dims.len(), data.len());
        Self { dims, data }
    }
}

fn checked_dims(n1: usize, n2: usize, n3: usize) -> Result<Dims> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::InvalidDimension(format!(
            "tensor dims must be positive, got {n1}x{n2}x{n3}"
        )));
    }
    Ok(Dims::new(n1, n2, n3))
}
