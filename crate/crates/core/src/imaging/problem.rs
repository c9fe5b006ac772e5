use crate::dense::Matrix;
use crate::error::{mismatch, Result};
use crate::scalar::Scalar;
use crate::solvers::{LinearTensorOperator, SandwichOperator};
use crate::tensor::Tensor3;

use super::blur::{build_blur_operator, gaussian_band_matrix, CrossChannelSpec, GaussianBlurSpec};
use super::metrics::add_noise;

/// Parameters of a synthetic deblurring problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlurModel {
    /// Horizontal blur `A⁽¹⁾`.
    pub within1: GaussianBlurSpec,
    /// Vertical blur `A⁽²⁾`.
    pub within2: GaussianBlurSpec,
    pub cross: CrossChannelSpec,
}

impl BlurModel {
    /// Same Gaussian in both directions.
    pub fn symmetric(size: usize, sigma: f64, bandwidth: usize, cross: CrossChannelSpec) -> Result<Self> {
        let g = GaussianBlurSpec::new(size, sigma, bandwidth)?;
        Ok(Self {
            within1: g,
            within2: g,
            cross,
        })
    }

    pub fn matrices<T: Scalar>(&self) -> Result<(Matrix<T>, Matrix<T>)> {
        Ok((
            gaussian_band_matrix(&self.within1)?,
            gaussian_band_matrix(&self.within2)?,
        ))
    }

    pub fn operator<T: Scalar>(&self) -> Result<SandwichOperator<T>> {
        let (a1, a2) = self.matrices()?;
        Ok(build_blur_operator(&a1, &a2, &self.cross)?.2)
    }
}

/// Ground truth, its blurred and noisy versions, and the blur operator.
#[derive(Clone, Debug)]
pub struct BlurProblem<T> {
    pub ground_truth: Tensor3<T>,
    pub blurred_clean: Tensor3<T>,
    pub observed: Tensor3<T>,
    pub noise_level: f64,
    pub operator: SandwichOperator<T>,
    pub model: BlurModel,
    pub rng_seed: u64,
}

impl<T: Scalar> BlurProblem<T> {
    /// Blurs `truth` with `model` and adds noise of relative level `nu`.
    pub fn synthesize(truth: Tensor3<T>, model: BlurModel, nu: f64, seed: u64) -> Result<Self> {
        let operator = model.operator::<T>()?;
        if truth.dims() != operator.domain_dims() {
            return Err(mismatch(
                "BlurProblem::synthesize",
                format!("image {} against blur domain {}", truth.dims(), operator.domain_dims()),
            ));
        }
        let blurred_clean = operator.apply(&truth)?;
        let (observed, _) = add_noise(&blurred_clean, nu, seed)?;
        Ok(Self {
            ground_truth: truth,
            blurred_clean,
            observed,
            noise_level: nu,
            operator,
            model,
            rng_seed: seed,
        })
    }

    /// `‖C − Ĉ‖_F / ‖Ĉ‖_F` as realized.
    pub fn realized_noise_level(&self) -> Result<T> {
        Ok(self.observed.sub(&self.blurred_clean)?.fro_norm() / self.blurred_clean.fro_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::patterns::Pattern;

    #[test]
    fn synthesized_problem_contract() {
        let model = BlurModel::symmetric(16, 2.0, 3, CrossChannelSpec::paper()).unwrap();
        let truth: Tensor3<f64> = Pattern::Checkerboard.render(16, 0).unwrap();
        let p = BlurProblem::synthesize(truth.clone(), model, 1e-3, 7).unwrap();
        assert!((p.realized_noise_level().unwrap() - 1e-3).abs() < 1e-12 * 1e-3 + 1e-15);
        let q = BlurProblem::synthesize(truth.clone(), model, 0.0, 7).unwrap();
        assert_eq!(q.observed, q.blurred_clean);
        let small: Tensor3<f64> = Pattern::Radial.render(8, 0).unwrap();
        assert!(BlurProblem::synthesize(small, model, 0.0, 1).is_err());
    }
}
