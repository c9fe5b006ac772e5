mod common;

use common::{dense_of, randn, rng, well_conditioned};
use dctensor::dense::lstsq;
use dctensor::solvers::{
    adjoint_check, dc_gk, dc_gmres, dc_lsqr, dc_lsqr_observed, AdjointRule, IdentityOperator, KOptMode, LambdaMode,
    LeftProductOperator, LinearTensorOperator, SandwichOperator, SolverConfig, TerminationReason,
};
use dctensor::Tensor;

fn exact_config(steps: usize) -> SolverConfig {
    SolverConfig {
        restart_m: steps,
        max_outer_iterations: 3,
        tolerance: 1e-12,
        max_inner_steps: steps,
        lambda_mode: LambdaMode::Fixed(0.0),
        rng_seed: 0,
        k_opt_mode: KOptMode::Fixed(steps),
    }
}

#[test]
fn gmres_is_exact_on_nonsingular_systems() {
    let mut r = rng(31);
    let op = well_conditioned(8, 2, 3, &mut r);
    let x = randn(8, 2, 3, &mut r);
    let c = op.apply(&x).unwrap();
    let x0 = Tensor::zeros(8, 2, 3).unwrap();
    let rep = dc_gmres(&op, &c, &x0, &exact_config(48)).unwrap();
    assert!(rep.relative_residual() <= 1e-8, "{}", rep.relative_residual());
    assert!(rep.solution.relative_diff(&x).unwrap() < 1e-7);
}

#[test]
fn gmres_cycles_do_not_increase_residual() {
    let mut r = rng(32);
    let op = well_conditioned(8, 2, 3, &mut r);
    let c = randn(8, 2, 3, &mut r);
    let x0 = Tensor::zeros(8, 2, 3).unwrap();
    let cfg = SolverConfig {
        restart_m: 3,
        max_outer_iterations: 8,
        tolerance: 1e-14,
        lambda_mode: LambdaMode::Fixed(0.0),
        ..SolverConfig::default()
    };
    let rep = dc_gmres(&op, &c, &x0, &cfg).unwrap();
    let mut prev = rep.initial_residual;
    for &res in &rep.residual_history {
        assert!(res <= prev * (1.0 + 1e-12));
        prev = res;
    }
}

#[test]
fn gmres_with_exact_start_does_nothing() {
    let mut r = rng(33);
    let op = well_conditioned(4, 2, 3, &mut r);
    let x = randn(4, 2, 3, &mut r);
    let c = op.apply(&x).unwrap();
    let rep = dc_gmres(&op, &c, &x, &SolverConfig::default()).unwrap();
    assert_eq!(rep.iterations_used, 0);
    assert_eq!(rep.initial_residual, 0.0);
    assert_eq!(rep.termination_reason, TerminationReason::Tolerance);
    assert_eq!(rep.solution, x);
}

#[test]
fn gmres_with_gcv_reports_positive_lambdas() {
    let mut r = rng(34);
    let op = well_conditioned(6, 2, 3, &mut r);
    let c = randn(6, 2, 3, &mut r);
    let x0 = Tensor::zeros(6, 2, 3).unwrap();
    let cfg = SolverConfig {
        restart_m: 4,
        max_outer_iterations: 3,
        ..SolverConfig::default()
    };
    let rep = dc_gmres(&op, &c, &x0, &cfg).unwrap();
    assert!(!rep.lambda_history.is_empty());
    assert!(rep.lambda_history.iter().all(|&l| l > 0.0));
    assert!(rep.residual_history.iter().all(|r| r.is_finite() && *r >= 0.0));
}

#[test]
fn gk_matches_dense_solution() {
    let mut r = rng(35);
    let op = well_conditioned(4, 2, 3, &mut r);
    let c = randn(4, 2, 3, &mut r);
    let rep = dc_gk(&op, &c, &exact_config(24)).unwrap();
    let dense = dense_of(&op);
    let direct = lstsq(&dense, c.as_slice()).unwrap();
    let direct = Tensor::from_vec(4, 2, 3, direct).unwrap();
    assert!(rep.solution.relative_diff(&direct).unwrap() < 1e-8);
    assert!(rep.relative_residual() < 1e-8);
}

#[test]
fn lsqr_residual_identity_and_monotonicity() {
    let mut r = rng(36);
    let op = well_conditioned(8, 2, 3, &mut r);
    let c = randn(8, 2, 3, &mut r);
    let cfg = SolverConfig {
        tolerance: 1e-14,
        max_inner_steps: 30,
        k_opt_mode: KOptMode::Fixed(30),
        ..SolverConfig::default()
    };
    let mut explicit = Vec::new();
    let rep = dc_lsqr_observed(&op, &c, &cfg, |_, x| {
        explicit.push(c.sub(&op.apply(x).unwrap()).unwrap().fro_norm());
    })
    .unwrap();
    assert_eq!(explicit.len(), rep.residual_history.len());
    for (phi, res) in rep.residual_history.iter().zip(&explicit) {
        assert!((phi - res).abs() <= 1e-8 * res.max(1e-300) + 1e-14 * rep.rhs_norm);
    }
    for w in rep.residual_history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
}

#[test]
fn lsqr_one_step_on_identity() {
    let mut r = rng(37);
    let c = randn(3, 2, 3, &mut r);
    let c = c.scaled(1.0 / c.fro_norm());
    let id = IdentityOperator::new(c.dims());
    let rep = dc_lsqr(&id, &c, &SolverConfig::default()).unwrap();
    assert_eq!(rep.iterations_used, 1);
    assert!(rep.solution.relative_diff(&c).unwrap() < 1e-14);
}

#[test]
fn lsqr_agrees_with_gk_at_zero_lambda() {
    let mut r = rng(38);
    let op = LeftProductOperator::new(randn(5, 4, 3, &mut r), 2).unwrap();
    let c = randn(5, 2, 3, &mut r);
    for m in [2, 4, 6] {
        let cfg = SolverConfig {
            tolerance: 1e-14,
            ..exact_config(m)
        };
        let g = dc_gk(&op, &c, &cfg).unwrap();
        let l = dc_lsqr(&op, &c, &cfg).unwrap();
        assert_eq!(l.iterations_used, m);
        assert!(l.solution.relative_diff(&g.solution).unwrap() < 1e-8);
    }
}

#[test]
fn lsqr_lcurve_index_in_range() {
    let mut r = rng(39);
    let op = LeftProductOperator::new(randn(6, 6, 3, &mut r), 2).unwrap();
    let c = randn(6, 2, 3, &mut r);
    let cfg = SolverConfig {
        max_inner_steps: 12,
        tolerance: 1e-14,
        k_opt_mode: KOptMode::LCurve,
        ..SolverConfig::default()
    };
    let rep = dc_lsqr(&op, &c, &cfg).unwrap();
    let k = rep.k_opt.unwrap();
    assert!((1..=12).contains(&k));
    assert_eq!(rep.termination_reason, TerminationReason::LCurveCorner);
}

#[test]
fn adjoint_checks() {
    let mut r = rng(40);
    let a = randn(5, 4, 3, &mut r);
    let b = randn(3, 2, 3, &mut r);
    let left = LeftProductOperator::new(a.clone(), 2).unwrap();
    assert!(adjoint_check(&left, 10, &mut r).unwrap() <= 1e-10);
    let sandwich = SandwichOperator::new(a.clone(), b.clone()).unwrap();
    assert!(adjoint_check(&sandwich, 10, &mut r).unwrap() <= 1e-10);

    // The transposed product is a true adjoint only when the transform is
    // orthogonal, i.e. for single-slice tensors.
    let transposed = SandwichOperator::with_rule(a.clone(), b, AdjointRule::TransposeProduct).unwrap();
    assert!(adjoint_check(&transposed, 10, &mut r).unwrap() > 1e-3);

    let sq = randn(4, 4, 3, &mut r);
    let wrong = LeftProductOperator::with_rule(sq, 2, AdjointRule::Untransposed).unwrap();
    assert!(adjoint_check(&wrong, 10, &mut r).unwrap() > 1e-3);
}

#[test]
fn solver_input_errors() {
    let mut r = rng(41);
    let op = LeftProductOperator::new(randn(4, 3, 2, &mut r), 2).unwrap();
    let c = randn(4, 2, 2, &mut r);
    let x0 = Tensor::zeros(3, 2, 2).unwrap();
    assert!(dc_gmres(&op, &c, &x0, &SolverConfig::default()).is_err());
    let zero = Tensor::zeros(4, 2, 2).unwrap();
    assert!(dc_gk(&op, &zero, &SolverConfig::default()).is_err());
    assert!(dc_lsqr(&op, &zero, &SolverConfig::default()).is_err());
    let bad = SolverConfig {
        tolerance: -1.0,
        ..SolverConfig::default()
    };
    assert!(dc_lsqr(&op, &c, &bad).is_err());
}
