//! Regularization of the small projected problems produced by the Krylov
//! processes: Tikhonov solves, GCV parameter choice and L-curve corners.

mod gcv;
mod lcurve;
mod tikhonov;

pub use gcv::{gcv_value, minimize_gcv, GcvCurve, GCV_GRID_POINTS, GCV_REL_TOL};
pub use lcurve::{lcurve_corner, LCurveCorner};
pub use tikhonov::{small_svd, tikhonov_solve, ProjectedProblem};
