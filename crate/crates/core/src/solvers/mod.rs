//! Tensor Krylov solvers over an abstract linear operator.

mod config;
mod krylov;
mod methods;
mod operator;

pub use config::{
    KOptMode, LambdaMode, SolverConfig, SolverKind, SolverReport, TerminationReason, DEFAULT_GK_STEPS,
    DEFAULT_LSQR_STEPS, DEFAULT_MAX_OUTER, DEFAULT_RESTART, DEFAULT_TOLERANCE,
};
pub use krylov::{arnoldi, golub_kahan, ArnoldiDecomposition, BidiagDecomposition, BREAKDOWN_TOL};
pub use methods::{dc_gk, dc_gmres, dc_lsqr, dc_lsqr_observed};
pub use operator::{
    adjoint_check, AdjointRule, IdentityOperator, LeftProductOperator, LinearTensorOperator, SandwichOperator,
};
