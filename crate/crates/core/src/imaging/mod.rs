//! The color blur model, noise, quality metrics, synthetic test images and
//! PNG input/output.

mod blur;
mod metrics;
mod patterns;
mod png;
mod problem;

pub use blur::{
    build_blur_operator, gaussian_band_matrix, kron_oracle, CrossChannelSpec, GaussianBlurSpec, KRON_ORACLE_MAX_SIZE,
    PAPER_MIXING,
};
pub use metrics::{add_noise, relative_error, snr};
pub use patterns::{checkerboard, radial, random_smooth, Pattern};
pub use png::{load_image, save_image, LoadedImage};
pub use problem::{BlurModel, BlurProblem};
