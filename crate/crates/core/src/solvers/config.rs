use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// How the Tikhonov parameter of a projected problem is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMode {
    Gcv,
    Fixed(f64),
}

/// How LSQR picks its stopping index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KOptMode {
    Fixed(usize),
    LCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Gmres,
    Gk,
    Lsqr,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Gmres, SolverKind::Gk, SolverKind::Lsqr];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Gmres => "gmres",
            SolverKind::Gk => "gk",
            SolverKind::Lsqr => "lsqr",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gmres" => Ok(SolverKind::Gmres),
            "gk" => Ok(SolverKind::Gk),
            "lsqr" => Ok(SolverKind::Lsqr),
            other => Err(Error::InvalidArgument(format!("unknown solver '{other}'"))),
        }
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_RESTART: usize = 10;
pub const DEFAULT_MAX_OUTER: usize = 10;
pub const DEFAULT_GK_STEPS: usize = 20;
pub const DEFAULT_LSQR_STEPS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Arnoldi steps per GMRES cycle.
    pub restart_m: usize,
    /// GMRES restart cycles.
    pub max_outer_iterations: usize,
    /// Relative residual `‖C − ℳ(X)‖/‖C‖` at which iteration stops.
    pub tolerance: f64,
    /// Golub-Kahan steps for DC-GK, iteration cap for DC-LSQR.
    pub max_inner_steps: usize,
    pub lambda_mode: LambdaMode,
    /// Recorded for reproducibility; the solvers themselves are deterministic.
    pub rng_seed: u64,
    pub k_opt_mode: KOptMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restart_m: DEFAULT_RESTART,
            max_outer_iterations: DEFAULT_MAX_OUTER,
            tolerance: DEFAULT_TOLERANCE,
            max_inner_steps: DEFAULT_GK_STEPS,
            lambda_mode: LambdaMode::Gcv,
            rng_seed: 0,
            k_opt_mode: KOptMode::LCurve,
        }
    }
}

impl SolverConfig {
    /// Defaults with the step cap suited to `kind`.
    pub fn for_solver(kind: SolverKind) -> Self {
        let mut cfg = Self::default();
        if kind == SolverKind::Lsqr {
            cfg.max_inner_steps = DEFAULT_LSQR_STEPS;
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        if self.restart_m == 0 {
            return Err(Error::InvalidArgument("restart_m must be at least 1".into()));
        }
        if self.max_inner_steps == 0 {
            return Err(Error::InvalidArgument("max_inner_steps must be at least 1".into()));
        }
        if let LambdaMode::Fixed(l) = self.lambda_mode {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "fixed lambda must be finite and nonnegative, got {l}"
                )));
            }
        }
        if self.k_opt_mode == KOptMode::Fixed(0) {
            return Err(Error::InvalidArgument("fixed k_opt must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminationReason {
    Tolerance,
    MaxIter,
    Breakdown,
    LCurveCorner,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminationReason::Tolerance => "tolerance",
            TerminationReason::MaxIter => "max_iter",
            TerminationReason::Breakdown => "breakdown",
            TerminationReason::LCurveCorner => "lcurve_corner",
        })
    }
}

/// Result of a solver run.
///
/// History entries are per GMRES cycle, per LSQR step, and a single entry
/// for DC-GK.
#[derive(Clone, Debug)]
pub struct SolverReport<T> {
    pub solution: Tensor3<T>,
    /// `‖C − ℳ(X)‖_F` after each iteration (LSQR: `|φ̄_{k+1}|`).
    pub residual_history: Vec<T>,
    /// Regularization parameter used in each iteration (empty for LSQR).
    pub lambda_history: Vec<T>,
    pub solution_norm_history: Vec<T>,
    pub iterations_used: usize,
    pub termination_reason: TerminationReason,
    /// `‖C − ℳ(X₀)‖_F`.
    pub initial_residual: T,
    /// `‖C‖_F`.
    pub rhs_norm: T,
    /// LSQR stopping index (one-based) when chosen by the L-curve or fixed.
    pub k_opt: Option<usize>,
    /// L-curve corner fell on a straight stretch of the curve.
    pub lcurve_flat: bool,
}

impl<T: crate::scalar::Scalar> SolverReport<T> {
    /// Last recorded residual relative to `‖C‖_F`.
    pub fn relative_residual(&self) -> T {
        let last = self.residual_history.last().copied().unwrap_or(self.initial_residual);
        last / self.rhs_norm
    }
}
