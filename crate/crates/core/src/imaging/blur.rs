use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::SandwichOperator;
use crate::tensor::Tensor3;

/// Within-channel Gaussian blur: `a_kl = exp(−(k−l)²/(2σ²)) / (σ√(2π))`
/// for `|k − l| ≤ r`, zero elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBlurSpec {
    pub size: usize,
    pub sigma: f64,
    pub bandwidth: usize,
}

impl GaussianBlurSpec {
    pub fn new(size: usize, sigma: f64, bandwidth: usize) -> Result<Self> {
        let spec = Self { size, sigma, bandwidth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidDimension("blur size must be positive".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.bandwidth >= self.size {
            return Err(Error::InvalidArgument(format!(
                "bandwidth {} must be smaller than size {}",
                self.bandwidth, self.size
            )));
        }
        Ok(())
    }
}

/// Banded symmetric Toeplitz Gaussian matrix, truncated at the borders.
pub fn gaussian_band_matrix<T: Scalar>(spec: &GaussianBlurSpec) -> Result<Matrix<T>> {
    spec.validate()?;
    let s = spec.sigma;
    let scale = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
    let r = spec.bandwidth;
    Ok(Matrix::from_fn(spec.size, spec.size, |k, l| {
        let d = k.abs_diff(l);
        if d <= r {
            let d = d as f64;
            T::lit(scale * (-(d * d) / (2.0 * s * s)).exp())
        } else {
            T::zero()
        }
    }))
}

/// The mixing matrix used in the experiments: 0.8 on the diagonal, 0.1 off it.
pub const PAPER_MIXING: [[f64; 3]; 3] = [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]];

const MIXING_TOL: f64 = 1e-12;

/// Cross-channel mixing `A_color` with unit row sums and the symmetric
/// circular pattern `a_rr = a_gg = a_bb`, `a_rg = a_gr`, `a_rb = a_br`,
/// `a_gb = a_bg`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossChannelSpec {
    mixing: [[f64; 3]; 3],
}

impl CrossChannelSpec {
    pub fn new(mixing: [[f64; 3]; 3]) -> Result<Self> {
        if mixing.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mixing matrix"));
        }
        for (i, row) in mixing.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > MIXING_TOL {
                return Err(Error::InvalidArgument(format!(
                    "mixing row {i} sums to {sum}, expected 1"
                )));
            }
        }
        let m = &mixing;
        let close = |a: f64, b: f64| (a - b).abs() <= MIXING_TOL;
        let circular = close(m[0][0], m[1][1])
            && close(m[0][0], m[2][2])
            && close(m[0][1], m[1][0])
            && close(m[0][2], m[2][0])
            && close(m[1][2], m[2][1]);
        if !circular {
            return Err(Error::UnsupportedModel(
                "mixing matrix lacks the symmetric circular structure".into(),
            ));
        }
        Ok(Self { mixing })
    }

    pub fn paper() -> Self {
        Self { mixing: PAPER_MIXING }
    }

    pub fn identity() -> Self {
        Self {
            mixing: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.mixing
    }

    /// `(α, β, γ) = (a_rr, a_gr, a_br)`, the first column.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.mixing[0][0], self.mixing[1][0], self.mixing[2][0])
    }
}

/// Builds `A` with slices `αA⁽²⁾, βA⁽²⁾, γA⁽²⁾`, `B` with slices
/// `A⁽¹⁾ᵀ, 0, 0`, and the operator `X ↦ A ⋆c X ⋆c B`.
pub fn build_blur_operator<T: Scalar>(
    within1: &Matrix<T>,
    within2: &Matrix<T>,
    cross: &CrossChannelSpec,
) -> Result<(Tensor3<T>, Tensor3<T>, SandwichOperator<T>)> {
    let n = within2.rows();
    if within2.cols() != n || within1.rows() != within1.cols() {
        return Err(Error::InvalidDimension(
            "within-channel blur matrices must be square".into(),
        ));
    }
    let (alpha, beta, gamma) = cross.coefficients();
    let coefs = [alpha, beta, gamma].map(T::lit);
    let a = Tensor3::from_fn(n, n, 3, |i, j, k| coefs[k] * within2[(i, j)])?;
    let m = within1.rows();
    let b = Tensor3::from_fn(m, m, 3, |i, j, k| if k == 0 { within1[(j, i)] } else { T::zero() })?;
    let op = SandwichOperator::new(a.clone(), b.clone())?;
    Ok((a, b, op))
}

/// Largest image side [`kron_oracle`] will materialize.
pub const KRON_ORACLE_MAX_SIZE: usize = 64;

/// `(A_color ⊗ A⁽¹⁾ ⊗ A⁽²⁾) vec(X)` with the Kronecker matrix built densely.
///
/// `vec(X)` stacks the channels, each column-major, which is exactly the
/// storage order of [`Tensor3`].
pub fn kron_oracle<T: Scalar>(
    within1: &Matrix<T>,
    within2: &Matrix<T>,
    cross: &CrossChannelSpec,
    x: &Tensor3<T>,
) -> Result<Tensor3<T>> {
    let (n1, n2) = (within2.rows(), within1.rows());
    if x.n1() != n1 || x.n2() != n2 || x.n3() != 3 {
        return Err(crate::error::mismatch(
            "kron_oracle",
            format!("image {} against {n1}x{n2}x3 blur", x.dims()),
        ));
    }
    if n1.max(n2) > KRON_ORACLE_MAX_SIZE {
        return Err(Error::SizeGuard {
            what: "kron_oracle",
            needed: 3 * n1 * n2,
            cap: 3 * KRON_ORACLE_MAX_SIZE * KRON_ORACLE_MAX_SIZE,
        });
    }
    let color = cross.matrix();
    let plane = n1 * n2;
    let dim = 3 * plane;
    let kron = Matrix::from_fn(dim, dim, |row, col| {
        let (c, r) = (row / plane, row % plane);
        let (d, q) = (col / plane, col % plane);
        let (i, j) = (r % n1, r / n1);
        let (k, l) = (q % n1, q / n1);
        T::lit(color[c][d]) * within1[(j, l)] * within2[(i, k)]
    });
    let y = kron.matvec(x.as_slice())?;
    Tensor3::from_vec(n1, n2, 3, y)
}
