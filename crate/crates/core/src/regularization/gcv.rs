use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tikhonov::{small_svd, ProjectedProblem};

/// Number of log-spaced samples in the coarse GCV scan.
pub const GCV_GRID_POINTS: usize = 200;
/// Relative bracket width at which golden-section refinement stops.
pub const GCV_REL_TOL: f64 = 1e-4;
/// Lower end of the search interval, relative to the largest singular value.
const GCV_LOWER_FACTOR: f64 = 1e-12;

/// Singular values of a projected matrix and the rotated right-hand side
/// `g̃ = β Uᵀ e₁`.
#[derive(Clone, Debug)]
pub struct GcvCurve<T> {
    singular_values: Vec<T>,
    transformed_rhs: Vec<T>,
}

impl<T: Scalar> GcvCurve<T> {
    pub fn new(singular_values: Vec<T>, transformed_rhs: Vec<T>) -> Result<Self> {
        if singular_values.is_empty() {
            return Err(Error::InvalidDimension("GCV curve needs singular values".into()));
        }
        if transformed_rhs.len() < singular_values.len() {
            return Err(Error::InvalidDimension(format!(
                "{} rhs components for {} singular values",
                transformed_rhs.len(),
                singular_values.len()
            )));
        }
        if singular_values.iter().chain(&transformed_rhs).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GCV curve"));
        }
        if singular_values.iter().any(|&s| s < T::zero()) || singular_values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "singular values must be nonnegative and nonincreasing".into(),
            ));
        }
        Ok(Self {
            singular_values,
            transformed_rhs,
        })
    }

    /// Curve of a projected problem, from the SVD of its matrix.
    pub fn from_problem(p: &ProjectedProblem<T>) -> Result<Self> {
        let d = small_svd(p.matrix())?;
        let beta = p.rhs_scale();
        let g = (0..d.u.cols()).map(|i| beta * d.u[(0, i)]).collect();
        Self::new(d.s, g)
    }

    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    pub fn transformed_rhs(&self) -> &[T] {
        &self.transformed_rhs
    }

    /// `Σ_{i>m} g̃_i²`, the part of the projected residual no choice of λ
    /// can remove. Not part of [`gcv_value`]; reported for diagnostics.
    pub fn residual_term(&self) -> T {
        self.transformed_rhs[self.singular_values.len()..]
            .iter()
            .map(|&g| g * g)
            .sum()
    }
}

/// `Σ_{i≤m} (g̃_i/(σ_i²+λ²))² / (Σ_{i≤m} 1/(σ_i²+λ²))²`.
pub fn gcv_value<T: Scalar>(curve: &GcvCurve<T>, lambda: T) -> Result<T> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    let l2 = lambda * lambda;
    let mut num = T::zero();
    let mut den = T::zero();
    for (&s, &g) in curve.singular_values.iter().zip(&curve.transformed_rhs) {
        let d = s * s + l2;
        if d == T::zero() {
            return Err(Error::GcvDivisionHazard);
        }
        let r = g / d;
        num += r * r;
        den += T::one() / d;
    }
    Ok(num / (den * den))
}

/// λ minimizing [`gcv_value`] over `[1e-12·σ₁, σ₁]`.
///
/// A 200-point logarithmic scan locates the basin; golden-section search in
/// `log λ` then narrows the bracket to a relative width of `1e-4`. A minimum
/// at either end of the scan is returned as that endpoint.
pub fn minimize_gcv<T: Scalar>(curve: &GcvCurve<T>) -> Result<T> {
    let sigma_max = curve.singular_values[0];
    if sigma_max <= T::zero() {
        return Err(Error::InvalidArgument(
            "GCV minimization needs a positive singular value".into(),
        ));
    }
    let hi = sigma_max.to_f64_lossy().ln();
    let lo = (sigma_max.to_f64_lossy() * GCV_LOWER_FACTOR).ln();
    let eval = |log_lambda: f64| -> Result<f64> { Ok(gcv_value(curve, T::lit(log_lambda.exp()))?.to_f64_lossy()) };

    let n = GCV_GRID_POINTS;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        let v = eval(g)?;
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    if best == 0 || best == n - 1 {
        let edge = if best == 0 {
            sigma_max * T::lit(GCV_LOWER_FACTOR)
        } else {
            sigma_max
        };
        return Ok(edge);
    }

    // Golden section on log λ within the neighbouring grid cells.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    let log_tol = GCV_REL_TOL.ln_1p();
    while b - a > log_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let choice = [(grid[best], best_val), (mid, eval(mid)?)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(x, _)| x)
        .unwrap_or(mid);
    Ok(T::lit(choice.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(s: &[f64], g: &[f64]) -> GcvCurve<f64> {
        GcvCurve::new(s.to_vec(), g.to_vec()).unwrap()
    }

    #[test]
    fn hand_evaluations() {
        assert_eq!(gcv_value(&curve(&[1.0], &[1.0, 0.0]), 0.0).unwrap(), 1.0);
        assert!((gcv_value(&curve(&[1.0], &[2.0, 0.0]), 1.0).unwrap() - 4.0).abs() < 1e-15);
        let v = gcv_value(&curve(&[2.0, 1.0], &[1.0, 1.0, 5.0]), 0.0).unwrap();
        assert!((v - 0.68).abs() < 1e-15);
    }

    #[test]
    fn division_hazard() {
        let c = curve(&[1.0, 0.0], &[1.0, 1.0, 0.0]);
        assert!(matches!(gcv_value(&c, 0.0), Err(Error::GcvDivisionHazard)));
        assert!(gcv_value(&c, 0.5).is_ok());
    }

    #[test]
    fn residual_term_is_separate() {
        let c = curve(&[2.0, 1.0], &[1.0, 1.0, 3.0]);
        assert_eq!(c.residual_term(), 9.0);
    }

    #[test]
    fn rejects_unsorted_or_zero_spectrum() {
        assert!(GcvCurve::new(vec![1.0, 2.0], vec![1.0, 1.0]).is_err());
        let z = curve(&[0.0], &[1.0]);
        assert!(minimize_gcv(&z).is_err());
    }

    #[test]
    fn monotone_curves_return_endpoints() {
        // All weight on the small singular value: GCV = 1/(1 + d2/d1)², decreasing.
        let dec = curve(&[1.0, 1e-3], &[0.0, 1.0]);
        assert_eq!(minimize_gcv(&dec).unwrap(), 1.0);
        // All weight on the large one: GCV = 1/(1 + d1/d2)², increasing.
        let inc = curve(&[1.0, 1e-3], &[1.0, 0.0]);
        assert_eq!(minimize_gcv(&inc).unwrap(), 1e-12);
    }
}
