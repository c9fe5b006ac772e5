use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Generator stream reserved for noise, so noise never shares draws with a
/// synthetic pattern built from the same seed.
pub(crate) const NOISE_STREAM: u64 = 1;

/// Adds Gaussian noise rescaled so that `‖N‖_F = ν·‖C‖_F` exactly.
///
/// Returns `(C + N, N)`.
pub fn add_noise<T: Scalar>(clean: &Tensor3<T>, nu: f64, seed: u64) -> Result<(Tensor3<T>, Tensor3<T>)> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise level must be finite and nonnegative, got {nu}"
        )));
    }
    let d = clean.dims();
    if nu == 0.0 {
        return Ok((clean.clone(), Tensor3::zeros(d.n1, d.n2, d.n3)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_STREAM);
    let mut noise = Tensor3::<T>::random_normal(d.n1, d.n2, d.n3, &mut rng)?;
    let raw = noise.fro_norm();
    noise.scale_mut(T::lit(nu) * clean.fro_norm() / raw);
    Ok((clean.add(&noise)?, noise))
}

/// `‖truth − restored‖_F / ‖truth‖_F`.
pub fn relative_error<T: Scalar>(restored: &Tensor3<T>, truth: &Tensor3<T>) -> Result<T> {
    let base = truth.fro_norm();
    if base == T::zero() {
        return Err(Error::ZeroTensor("relative_error reference"));
    }
    Ok(restored.sub(truth)?.fro_norm() / base)
}

/// `10·log₁₀(‖X − mean(X)‖² / ‖restored − X‖²)` in decibels; `+∞` on an
/// exact match.
pub fn snr<T: Scalar>(restored: &Tensor3<T>, truth: &Tensor3<T>) -> Result<T> {
    let err = restored.sub(truth)?.fro_norm();
    if err == T::zero() {
        return Ok(T::infinity());
    }
    let data = truth.as_slice();
    let mean = data.iter().copied().sum::<T>() / T::from_len(data.len());
    let centered: T = data.iter().map(|&v| (v - mean) * (v - mean)).sum();
    Ok(T::lit(10.0) * (centered / (err * err)).log10())
}
