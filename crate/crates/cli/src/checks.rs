//! Self-checks run by `dctensor check`. The product and transpose kernels
//! are injectable so a deliberately broken kernel can be shown to trip a
//! named invariant.

use std::time::Instant;

use dctensor::imaging::{
    add_noise, build_blur_operator, gaussian_band_matrix, kron_oracle, CrossChannelSpec, GaussianBlurSpec,
};
use dctensor::regularization::{gcv_value, lcurve_corner, minimize_gcv, tikhonov_solve, GcvCurve, ProjectedProblem};
use dctensor::solvers::{
    adjoint_check, arnoldi, dc_gk, dc_gmres, dc_lsqr_observed, golub_kahan, KOptMode, LambdaMode, LeftProductOperator,
    LinearTensorOperator, SandwichOperator, SolverConfig,
};
use dctensor::{cosine_product, diamond, make_transform, mat, oracle_product, Direction, Mat, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckLevel {
    Quick,
    Full,
}

pub type ProductKernel = fn(&Tensor, &Tensor) -> dctensor::Result<Tensor>;
pub type TransposeKernel = fn(&Tensor) -> Tensor;

/// The kernels under test.
#[derive(Clone, Copy)]
pub struct Kernels {
    pub product: ProductKernel,
    pub transpose: TransposeKernel,
}

impl Default for Kernels {
    fn default() -> Self {
        Self {
            product: cosine_product,
            transpose: Tensor::transpose,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn(&Kernels, &mut ChaCha8Rng) -> Result<String, String>;

const QUICK: &[(&str, Check)] = &[
    ("product.oracle_equivalence", product_oracle),
    ("product.identity", product_identity),
    ("transpose.mat_contract", transpose_mat),
    ("transpose.product_reversal", transpose_reversal),
    ("transform.round_trip", transform_round_trip),
    ("adjoint.left_product", adjoint_left),
    ("adjoint.sandwich", adjoint_sandwich),
];

const FULL: &[(&str, Check)] = &[
    ("product.associativity", product_associativity),
    ("arnoldi.relations", arnoldi_relations),
    ("golub_kahan.relations", gk_relations),
    ("lsqr.residual_identity", lsqr_identity),
    ("solvers.exact_at_zero_lambda", solvers_exact),
    ("gcv.dense_scan", gcv_scan),
    ("tikhonov.normal_equations", tikhonov_normal),
    ("lcurve.sharp_corner", lcurve_sharp),
    ("blur.unmixed_kronecker", blur_unmixed),
    ("blur.adjoint", blur_adjoint),
    ("noise.level", noise_level),
];

pub fn run_checks(level: CheckLevel, kernels: &Kernels, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites: &[&[(&str, Check)]] = match level {
        CheckLevel::Quick => &[QUICK],
        CheckLevel::Full => &[QUICK, FULL],
    };
    suites
        .iter()
        .flat_map(|s| s.iter())
        .map(|&(name, check)| {
            let start = Instant::now();
            let result = check(kernels, &mut rng);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                seconds,
            }
        })
        .collect()
}

fn randn(n1: usize, n2: usize, n3: usize, rng: &mut ChaCha8Rng) -> Tensor {
    Tensor::random_normal(n1, n2, n3, rng).expect("positive dims")
}

fn dims(rng: &mut ChaCha8Rng, hi: usize) -> usize {
    rng.random_range(1..=hi)
}

/// Passes when `worst <= tol`.
fn bound(what: &str, worst: f64, tol: f64) -> Result<String, String> {
    let msg = format!("{what} {worst:.2e} (tol {tol:.0e})");
    if worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn product_oracle(k: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let (n1, n2, m, n3) = (dims(rng, 4), dims(rng, 4), dims(rng, 4), dims(rng, 4));
        let a = randn(n1, n2, n3, rng);
        let b = randn(n2, m, n3, rng);
        let fast = (k.product)(&a, &b).map_err(fail)?;
        let slow = oracle_product(&a, &b).map_err(fail)?;
        worst = worst.max(fast.relative_diff(&slow).map_err(fail)?);
    }
    bound("max relative error vs ten(mat·mat)", worst, 1e-10)
}

fn product_identity(k: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let a = randn(3, 4, 5, rng);
    let id = dctensor::identity_tensor::<f64>(4, 5).map_err(fail)?;
    let back = (k.product)(&a, &id).map_err(fail)?;
    bound("‖A⋆I − A‖/‖A‖", back.relative_diff(&a).map_err(fail)?, 1e-12)
}

fn transpose_mat(k: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = randn(dims(rng, 4), dims(rng, 4), dims(rng, 4), rng);
        let lhs = mat(&(k.transpose)(&a));
        let rhs = mat(&a).transpose();
        if (lhs.rows(), lhs.cols()) != (rhs.rows(), rhs.cols()) {
            return Err("mat(Aᵀ) has the wrong shape".into());
        }
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    bound("max |mat(Aᵀ) − mat(A)ᵀ|", worst, 1e-12)
}

fn transpose_reversal(k: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (n1, n2, m, n3) = (dims(rng, 4), dims(rng, 4), dims(rng, 4), dims(rng, 4));
        let a = randn(n1, n2, n3, rng);
        let b = randn(n2, m, n3, rng);
        let lhs = (k.transpose)(&(k.product)(&a, &b).map_err(fail)?);
        let rhs = oracle_product(&(k.transpose)(&b), &(k.transpose)(&a)).map_err(fail)?;
        worst = worst.max(lhs.relative_diff(&rhs).map_err(fail)?);
    }
    bound("max relative ‖(A⋆B)ᵀ − Bᵀ⋆Aᵀ‖", worst, 1e-10)
}

fn transform_round_trip(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for n3 in 1..=8 {
        let a = randn(3, 2, n3, rng);
        let t = make_transform::<f64>(n3).map_err(fail)?;
        let hat = t.apply(&a, Direction::Forward).map_err(fail)?;
        let back = t.apply(&hat, Direction::Inverse).map_err(fail)?;
        worst = worst.max(back.relative_diff(&a).map_err(fail)?);
    }
    bound("max relative round-trip error", worst, 1e-12)
}

fn adjoint_left(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let op = LeftProductOperator::new(randn(5, 4, 3, rng), 2).map_err(fail)?;
    bound("adjoint defect", adjoint_check(&op, 10, rng).map_err(fail)?, 1e-10)
}

fn adjoint_sandwich(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let op = SandwichOperator::new(randn(5, 4, 3, rng), randn(3, 2, 3, rng)).map_err(fail)?;
    bound("adjoint defect", adjoint_check(&op, 10, rng).map_err(fail)?, 1e-10)
}

fn product_associativity(k: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n3 = dims(rng, 5);
        let (a, b, c) = (randn(3, 4, n3, rng), randn(4, 2, n3, rng), randn(2, 3, n3, rng));
        let left = (k.product)(&(k.product)(&a, &b).map_err(fail)?, &c).map_err(fail)?;
        let right = (k.product)(&a, &(k.product)(&b, &c).map_err(fail)?).map_err(fail)?;
        worst = worst.max(left.relative_diff(&right).map_err(fail)?);
    }
    bound("max relative ‖(A⋆B)⋆C − A⋆(B⋆C)‖", worst, 1e-10)
}

/// `X ↦ A ⋆c X` whose transformed slices are `2I + 0.2·G/√n`.
fn well_conditioned(n: usize, s: usize, p: usize, rng: &mut ChaCha8Rng) -> Result<LeftProductOperator<f64>, String> {
    let g = randn(n, n, p, rng);
    let scale = 0.2 / (n as f64).sqrt();
    let hat = Tensor::from_fn(n, n, p, |i, j, k| {
        scale * g.get(i, j, k) + if i == j { 2.0 } else { 0.0 }
    })
    .map_err(fail)?;
    let a = make_transform::<f64>(p)
        .map_err(fail)?
        .apply(&hat, Direction::Inverse)
        .map_err(fail)?;
    LeftProductOperator::new(a, s).map_err(fail)
}

fn arnoldi_relations(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let op = LeftProductOperator::new(randn(8, 8, 3, rng), 2).map_err(fail)?;
        let d = arnoldi(&op, &randn(8, 2, 3, rng), 5).map_err(fail)?;
        let m = d.steps();
        let mv = d.basis.truncated(m).map(|v| op.apply(v)).map_err(fail)?;
        let vh = d.basis.combine_matrix(&d.hessenberg).map_err(fail)?;
        worst = worst.max(dctensor::basis::basis_max_diff(&mv, &vh).map_err(fail)?);
        let g = diamond(&d.basis, &d.basis).map_err(fail)?;
        worst = worst.max(g.max_abs_diff(&Mat::identity(d.basis.len())));
    }
    bound("max defect of ℳ(V_m) = V_{m+1}⊛H̃_m and VᵀV = I", worst, 1e-10)
}

fn gk_relations(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let op = LeftProductOperator::new(randn(8, 6, 3, rng), 2).map_err(fail)?;
        let c = randn(8, 2, 3, rng);
        let d = golub_kahan(&op, &c, 5).map_err(fail)?;
        let m = d.steps();
        let mv = d.v_basis.truncated(m).map(|v| op.apply(v)).map_err(fail)?;
        let uc = d.u_basis.combine_matrix(&d.bidiag).map_err(fail)?;
        worst = worst.max(dctensor::basis::basis_max_diff(&mv, &uc).map_err(fail)?);
        let mut e1 = vec![0.0; d.u_basis.len()];
        e1[0] = d.beta1;
        let back = d.u_basis.combine(&e1).map_err(fail)?;
        worst = worst.max(back.sub(&c).map_err(fail)?.max_abs());
    }
    bound("max defect of ℳ(V_m) = U_{m+1}⊛C̃_m and U(β₁e₁) = C", worst, 1e-10)
}

fn lsqr_identity(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let op = well_conditioned(8, 2, 3, rng)?;
    let c = randn(8, 2, 3, rng);
    let cfg = SolverConfig {
        tolerance: 1e-14,
        max_inner_steps: 20,
        k_opt_mode: KOptMode::Fixed(20),
        ..SolverConfig::default()
    };
    let mut explicit = Vec::new();
    let rep = dc_lsqr_observed(&op, &c, &cfg, |_, x| {
        explicit.push(op.apply(x).and_then(|ax| c.sub(&ax)).map(|r| r.fro_norm()));
    })
    .map_err(fail)?;
    let mut worst = 0.0f64;
    for (phi, res) in rep.residual_history.iter().zip(explicit) {
        let res = res.map_err(fail)?;
        worst = worst.max((phi - res).abs() / rep.rhs_norm);
    }
    bound("max |φ̄ − ‖C − ℳ(X_k)‖| / ‖C‖", worst, 1e-10)
}

fn solvers_exact(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let op = well_conditioned(8, 2, 3, rng)?;
    let c = op.apply(&randn(8, 2, 3, rng)).map_err(fail)?;
    let cfg = SolverConfig {
        restart_m: 48,
        max_outer_iterations: 2,
        tolerance: 1e-12,
        max_inner_steps: 48,
        lambda_mode: LambdaMode::Fixed(0.0),
        rng_seed: 0,
        k_opt_mode: KOptMode::Fixed(48),
    };
    let x0 = Tensor::zeros(8, 2, 3).map_err(fail)?;
    let res = [
        dc_gmres(&op, &c, &x0, &cfg).map_err(fail)?.relative_residual(),
        dc_gk(&op, &c, &cfg).map_err(fail)?.relative_residual(),
        dc_lsqr_observed(&op, &c, &cfg, |_, _| {})
            .map_err(fail)?
            .relative_residual(),
    ];
    bound("worst relative residual", res.into_iter().fold(0.0, f64::max), 1e-8)
}

fn gcv_scan(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let m = 8;
        let s: Vec<f64> = (0..m).map(|i| 10f64.powf(-(i as f64) * 0.6)).collect();
        let g: Vec<f64> = (0..=m)
            .map(|i| 10f64.powf(-(i as f64) * 0.3) * rng.random_range(0.2..1.0) + 1e-3 * rng.random_range(-1.0..1.0))
            .collect();
        let curve = GcvCurve::new(s, g).map_err(fail)?;
        let fast = minimize_gcv(&curve).map_err(fail)?;
        let (lo, hi) = ((1e-12f64).ln(), 0.0f64);
        let points = 100_000;
        let slow = (0..points)
            .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
            .map(|l| (l, gcv_value(&curve, l).unwrap_or(f64::INFINITY)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|p| p.0)
            .unwrap_or(f64::NAN);
        worst = worst.max((fast - slow).abs() / slow);
    }
    bound("max relative gap to dense log-grid scan", worst, 1e-3)
}

fn tikhonov_normal(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let m = Mat::from_fn(7, 6, |_, _| rng.random_range(-1.0..1.0));
    let p = ProjectedProblem::new(m.clone(), 1.3).map_err(fail)?;
    let mut worst = 0.0f64;
    for lambda in [1e-3, 0.1, 1.0] {
        let y = tikhonov_solve(&p, lambda).map_err(fail)?;
        let mtmy = m.tr_matvec(&m.matvec(&y).map_err(fail)?).map_err(fail)?;
        let rhs = m.tr_matvec(&p.rhs()).map_err(fail)?;
        let scale = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = mtmy
            .iter()
            .zip(&y)
            .zip(&rhs)
            .map(|((a, b), c)| (a + lambda * lambda * b - c).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err / scale);
    }
    bound("max relative normal-equation residual", worst, 1e-10)
}

fn lcurve_sharp(_: &Kernels, _: &mut ChaCha8Rng) -> Result<String, String> {
    let pts = [
        (1.0, 1e-3),
        (1e-1, 1e-2),
        (1e-2, 1e-1),
        (1e-2 * 0.9, 1.0),
        (1e-2 * 0.85, 10.0),
    ];
    let c = lcurve_corner(&pts).map_err(fail)?;
    if c.index == 2 {
        Ok("corner at index 2".into())
    } else {
        Err(format!("corner at index {}, expected 2", c.index))
    }
}

fn blur_unmixed(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let a: Mat = gaussian_band_matrix(&GaussianBlurSpec::new(8, 2.0, 3).map_err(fail)?).map_err(fail)?;
    let cross = CrossChannelSpec::identity();
    let (_, _, op) = build_blur_operator(&a, &a, &cross).map_err(fail)?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = randn(8, 8, 3, rng);
        let lin = kron_oracle(&a, &a, &cross, &x).map_err(fail)?;
        worst = worst.max(op.apply(&x).map_err(fail)?.relative_diff(&lin).map_err(fail)?);
    }
    bound("max relative gap to Kronecker model without mixing", worst, 1e-10)
}

fn blur_adjoint(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let a: Mat = gaussian_band_matrix(&GaussianBlurSpec::new(12, 2.0, 3).map_err(fail)?).map_err(fail)?;
    let (_, _, op) = build_blur_operator(&a, &a, &CrossChannelSpec::paper()).map_err(fail)?;
    bound("adjoint defect", adjoint_check(&op, 5, rng).map_err(fail)?, 1e-10)
}

fn noise_level(_: &Kernels, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let clean = randn(8, 8, 3, rng);
    let (noisy, noise) = add_noise(&clean, 1e-3, rng.random()).map_err(fail)?;
    let nu = noise.fro_norm() / clean.fro_norm();
    let consistent = noisy.sub(&clean).map_err(fail)?.relative_diff(&noise).map_err(fail)?;
    bound(
        "|ν̂ − ν|/ν and noise consistency",
        ((nu - 1e-3).abs() / 1e-3).max(consistent),
        1e-10,
    )
}
