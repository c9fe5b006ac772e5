use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Deterministic synthetic test images.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    Checkerboard,
    Radial,
    RandomSmooth,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Checkerboard, Pattern::Radial, Pattern::RandomSmooth];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Checkerboard => "checkerboard",
            Pattern::Radial => "radial",
            Pattern::RandomSmooth => "random-smooth",
        }
    }

    /// An `n × n × 3` image with entries in `[0, 1]`. Only
    /// [`Pattern::RandomSmooth`] depends on `seed`.
    pub fn render<T: Scalar>(self, n: usize, seed: u64) -> Result<Tensor3<T>> {
        match self {
            Pattern::Checkerboard => checkerboard(n, 8),
            Pattern::Radial => radial(n),
            Pattern::RandomSmooth => random_smooth(n, seed),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "checkerboard" | "checker" => Ok(Pattern::Checkerboard),
            "radial" => Ok(Pattern::Radial),
            "random-smooth" | "smooth" => Ok(Pattern::RandomSmooth),
            other => Err(Error::InvalidArgument(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Colored checkerboard with `square`-pixel cells and a vertical ramp in
/// the blue channel.
pub fn checkerboard<T: Scalar>(n: usize, square: usize) -> Result<Tensor3<T>> {
    if square == 0 {
        return Err(Error::InvalidArgument("checkerboard square must be positive".into()));
    }
    let nf = n as f64;
    Tensor3::from_fn(n, n, 3, |i, j, k| {
        let b = ((i / square + j / square) % 2) as f64;
        T::lit(match k {
            0 => b,
            1 => 1.0 - 0.5 * b,
            _ => 0.25 + 0.5 * b * (i as f64 / nf),
        })
    })
}

/// Radial gradients centered in the image.
pub fn radial<T: Scalar>(n: usize) -> Result<Tensor3<T>> {
    let half = n as f64 / 2.0;
    let reach = n as f64 / std::f64::consts::SQRT_2;
    Tensor3::from_fn(n, n, 3, |i, j, k| {
        let r = (i as f64 - half).hypot(j as f64 - half) / reach;
        let v = match k {
            0 => 1.0 - r,
            1 => 0.5 + 0.5 * (3.0 * std::f64::consts::PI * r).cos(),
            _ => r,
        };
        T::lit(v.clamp(0.0, 1.0))
    })
}

/// Width of the periodic Gaussian low-pass filter, in pixels.
const SMOOTH_WIDTH: f64 = 10.0 / std::f64::consts::PI;

/// Seeded white noise, smoothed by a periodic Gaussian filter in each
/// direction and min-max scaled to `[0, 1]` over the whole image.
pub fn random_smooth<T: Scalar>(n: usize, seed: u64) -> Result<Tensor3<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Tensor3::<f64>::random_normal(n, n, 3, &mut rng)?;

    let reach = (4.0 * SMOOTH_WIDTH).ceil() as isize;
    let kernel: Vec<f64> = (-reach..=reach)
        .map(|d| (-(d * d) as f64 / (2.0 * SMOOTH_WIDTH * SMOOTH_WIDTH)).exp())
        .collect();
    let wrap = |i: isize| i.rem_euclid(n as isize) as usize;
    let blur = |src: &Tensor3<f64>, along_rows: bool| {
        Tensor3::from_fn(n, n, 3, |i, j, k| {
            kernel
                .iter()
                .enumerate()
                .map(|(t, w)| {
                    let d = t as isize - reach;
                    if along_rows {
                        w * src.get(wrap(i as isize + d), j, k)
                    } else {
                        w * src.get(i, wrap(j as isize + d), k)
                    }
                })
                .sum()
        })
    };
    let smooth = blur(&blur(&noise, true)?, false)?;
    let data = smooth.as_slice();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    Tensor3::from_fn(n, n, 3, |i, j, k| T::lit((smooth.get(i, j, k) - lo) / span))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_are_in_range_and_deterministic() {
        for p in Pattern::ALL {
            let a: Tensor3<f64> = p.render(16, 3).unwrap();
            assert_eq!(a.dims(), crate::tensor::Dims::new(16, 16, 3));
            assert!(a.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
            assert_eq!(a, p.render(16, 3).unwrap());
            assert_eq!(p.name().parse::<Pattern>().unwrap(), p);
        }
        let a: Tensor3<f64> = random_smooth(16, 1).unwrap();
        let b: Tensor3<f64> = random_smooth(16, 2).unwrap();
        assert_ne!(a, b);
        assert!("plaid".parse::<Pattern>().is_err());
    }

    #[test]
    fn checkerboard_cells() {
        let c: Tensor3<f64> = checkerboard(16, 8).unwrap();
        assert_eq!(c.get(0, 0, 0), 0.0);
        assert_eq!(c.get(0, 8, 0), 1.0);
        assert_eq!(c.get(8, 8, 0), 0.0);
    }
}
