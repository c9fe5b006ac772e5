//! DC-GMRES, DC-GK and DC-LSQR.

use crate::error::{Error, Result};
use crate::regularization::{lcurve_corner, minimize_gcv, tikhonov_solve, GcvCurve, ProjectedProblem};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

use super::config::{KOptMode, LambdaMode, SolverConfig, SolverReport, TerminationReason};
use super::krylov::{arnoldi, golub_kahan, Bidiagonalizer, GkStep};
use super::operator::{expect_dims, LinearTensorOperator};

fn choose_lambda<T: Scalar>(p: &ProjectedProblem<T>, mode: LambdaMode) -> Result<T> {
    match mode {
        LambdaMode::Fixed(l) => Ok(T::lit(l)),
        LambdaMode::Gcv => minimize_gcv(&GcvCurve::from_problem(p)?),
    }
}

fn check_finite<T: Scalar>(x: &Tensor3<T>, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::SolverAbort(format!("non-finite values in {what}")))
    }
}

/// Restarted GMRES with Tikhonov regularization of each projected problem.
///
/// Each cycle recomputes `R₀ = C − ℳ(X₀)`, runs `restart_m` Arnoldi steps
/// from it, picks λ (GCV or fixed), and adds `𝕍_m ⊛ y` to the iterate.
pub fn dc_gmres<T, O>(op: &O, c: &Tensor3<T>, x0: &Tensor3<T>, cfg: &SolverConfig) -> Result<SolverReport<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
{
    cfg.validate()?;
    if !op.is_square() {
        return Err(Error::InvalidArgument("DC-GMRES needs a square operator".into()));
    }
    expect_dims(c, op.range_dims(), "dc_gmres")?;
    expect_dims(x0, op.domain_dims(), "dc_gmres")?;
    let rhs_norm = c.fro_norm();
    if rhs_norm == T::zero() {
        return Err(Error::ZeroTensor("DC-GMRES right-hand side"));
    }
    let tol = T::lit(cfg.tolerance);
    let mut x = x0.clone();
    let mut r = c.sub(&op.apply(&x)?)?;
    let initial_residual = r.fro_norm();
    let mut report = SolverReport {
        solution: x.clone(),
        residual_history: Vec::new(),
        lambda_history: Vec::new(),
        solution_norm_history: Vec::new(),
        iterations_used: 0,
        termination_reason: TerminationReason::MaxIter,
        initial_residual,
        rhs_norm,
        k_opt: None,
        lcurve_flat: false,
    };
    let mut beta = initial_residual;
    if beta / rhs_norm < tol {
        report.termination_reason = TerminationReason::Tolerance;
        return Ok(report);
    }
    for _ in 0..cfg.max_outer_iterations {
        let arn = arnoldi(op, &r, cfg.restart_m)?;
        let problem = ProjectedProblem::new(arn.hessenberg.clone(), arn.beta)?;
        let lambda = choose_lambda(&problem, cfg.lambda_mode)?;
        let y = tikhonov_solve(&problem, lambda)?;
        let k = arn.steps();
        let update = arn.basis.truncated(k).combine(&y)?;
        x.axpy(T::one(), &update)?;
        check_finite(&x, "DC-GMRES iterate")?;
        r = c.sub(&op.apply(&x)?)?;
        beta = r.fro_norm();
        report.iterations_used += 1;
        report.residual_history.push(beta);
        report.lambda_history.push(lambda);
        report.solution_norm_history.push(x.fro_norm());
        if beta / rhs_norm < tol {
            report.termination_reason = TerminationReason::Tolerance;
            break;
        }
        if arn.breakdown_step.is_some() {
            report.termination_reason = TerminationReason::Breakdown;
            break;
        }
    }
    report.solution = x;
    Ok(report)
}

/// Golub-Kahan bidiagonalization to `max_inner_steps`, then one Tikhonov
/// solve of the projected problem `min ‖C̃ y − β₁e₁‖² + λ²‖y‖²`.
pub fn dc_gk<T, O>(op: &O, c: &Tensor3<T>, cfg: &SolverConfig) -> Result<SolverReport<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
{
    cfg.validate()?;
    expect_dims(c, op.range_dims(), "dc_gk")?;
    let d = golub_kahan(op, c, cfg.max_inner_steps)?;
    let problem = ProjectedProblem::new(d.bidiag.clone(), d.beta1)?;
    let lambda = choose_lambda(&problem, cfg.lambda_mode)?;
    let y = tikhonov_solve(&problem, lambda)?;
    let k = d.steps();
    let x = d.v_basis.truncated(k).combine(&y)?;
    check_finite(&x, "DC-GK solution")?;
    let residual = c.sub(&op.apply(&x)?)?.fro_norm();
    let rhs_norm = d.beta1;
    let termination_reason = if residual / rhs_norm < T::lit(cfg.tolerance) {
        TerminationReason::Tolerance
    } else if d.breakdown_step.is_some() {
        TerminationReason::Breakdown
    } else {
        TerminationReason::MaxIter
    };
    Ok(SolverReport {
        residual_history: vec![residual],
        lambda_history: vec![lambda],
        solution_norm_history: vec![x.fro_norm()],
        solution: x,
        iterations_used: k,
        termination_reason,
        initial_residual: rhs_norm,
        rhs_norm,
        k_opt: None,
        lcurve_flat: false,
    })
}

/// LSQR with `X₀ = 0` and the iteration count as regularizer.
pub fn dc_lsqr<T, O>(op: &O, c: &Tensor3<T>, cfg: &SolverConfig) -> Result<SolverReport<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
{
    dc_lsqr_observed(op, c, cfg, |_, _| {})
}

/// [`dc_lsqr`], calling `observe(k, X_k)` after every step.
pub fn dc_lsqr_observed<T, O, F>(op: &O, c: &Tensor3<T>, cfg: &SolverConfig, mut observe: F) -> Result<SolverReport<T>>
where
    T: Scalar,
    O: LinearTensorOperator<T> + ?Sized,
    F: FnMut(usize, &Tensor3<T>),
{
    cfg.validate()?;
    expect_dims(c, op.range_dims(), "dc_lsqr")?;
    let d = op.domain_dims();
    let zero = Tensor3::zeros(d.n1, d.n2, d.n3)?;
    let (mut gk, started) = Bidiagonalizer::start(op, c, false)?;
    let beta1 = gk.beta1;
    let mut report = SolverReport {
        solution: zero.clone(),
        residual_history: Vec::new(),
        lambda_history: Vec::new(),
        solution_norm_history: Vec::new(),
        iterations_used: 0,
        termination_reason: TerminationReason::Breakdown,
        initial_residual: beta1,
        rhs_norm: beta1,
        k_opt: None,
        lcurve_flat: false,
    };
    if !started {
        return Ok(report);
    }
    let cap = match cfg.k_opt_mode {
        KOptMode::Fixed(k) => k.min(cfg.max_inner_steps),
        KOptMode::LCurve => cfg.max_inner_steps,
    };
    let keep_iterates = cfg.k_opt_mode == KOptMode::LCurve;
    let tol = T::lit(cfg.tolerance) * beta1;

    let mut x = zero.clone();
    let mut p = zero;
    let mut rho_bar = gk.alphas[0];
    let mut phi_bar = beta1;
    let mut theta = T::zero();
    let mut iterates = Vec::new();
    let mut reason = TerminationReason::MaxIter;

    for j in 0..cap {
        let status = gk.step()?;
        let beta_next = gk.betas[j];
        let alpha_next = if status == GkStep::Continue {
            gk.alphas[j + 1]
        } else {
            T::zero()
        };
        let rho = rho_bar.hypot(beta_next);
        let cs = rho_bar / rho;
        let sn = beta_next / rho;
        let theta_next = sn * alpha_next;
        rho_bar = cs * alpha_next;
        let phi = cs * phi_bar;
        phi_bar = -sn * phi_bar;

        // P_j = (V_j − θ_j P_{j−1}) / ρ_j
        let mut next_p = gk.v[j].clone();
        next_p.axpy(-theta, &p)?;
        next_p.scale_mut(T::one() / rho);
        p = next_p;
        theta = theta_next;
        x.axpy(phi, &p)?;
        check_finite(&x, "DC-LSQR iterate")?;

        report.iterations_used = j + 1;
        report.residual_history.push(phi_bar.abs());
        report.solution_norm_history.push(x.fro_norm());
        observe(j + 1, &x);
        if keep_iterates {
            iterates.push(x.clone());
        }
        if phi_bar.abs() < tol {
            reason = TerminationReason::Tolerance;
            break;
        }
        if status != GkStep::Continue {
            reason = TerminationReason::Breakdown;
            break;
        }
    }

    report.termination_reason = reason;
    report.k_opt = Some(report.iterations_used);
    if keep_iterates && reason != TerminationReason::Tolerance && report.iterations_used >= 3 {
        let points: Vec<(f64, f64)> = report
            .residual_history
            .iter()
            .zip(&report.solution_norm_history)
            .map(|(&r, &s)| (r.to_f64_lossy(), s.to_f64_lossy()))
            .collect();
        let corner = lcurve_corner(&points)?;
        report.k_opt = Some(corner.index + 1);
        report.lcurve_flat = corner.flat;
        report.termination_reason = TerminationReason::LCurveCorner;
        x = iterates.swap_remove(corner.index);
    }
    report.solution = x;
    Ok(report)
}
