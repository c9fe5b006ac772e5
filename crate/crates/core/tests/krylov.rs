mod common;

use common::{randn, rng, well_conditioned};
use dctensor::basis::basis_max_diff;
use dctensor::solvers::{arnoldi, golub_kahan, LeftProductOperator, LinearTensorOperator};
use dctensor::{diamond, Basis, Mat};

fn max_block_diff(a: &Basis, b: &Basis) -> f64 {
    basis_max_diff(a, b).unwrap()
}

#[test]
fn proposition_one_relations() {
    let mut r = rng(21);
    for _ in 0..5 {
        let op = LeftProductOperator::new(randn(6, 6, 3, &mut r), 2).unwrap();
        let seed = randn(6, 2, 3, &mut r);
        let m = 4;
        let d = arnoldi(&op, &seed, m).unwrap();
        assert!(d.breakdown_step.is_none());
        let v_m = d.basis.truncated(m);
        let mv = v_m.map(|v| op.apply(v)).unwrap();

        // ℳ(𝕍_m) = 𝕍_{m+1} ⊛ H̃_m
        let vh = d.basis.combine_matrix(&d.hessenberg).unwrap();
        assert!(max_block_diff(&mv, &vh) < 1e-10);

        // ℳ(𝕍_m) = 𝕍_m ⊛ H_m + h_{m+1,m} 𝒱_{m+1} e_mᵀ
        let mut split = v_m.combine_matrix(&d.square_hessenberg()).unwrap().into_blocks();
        split[m - 1].axpy(d.hessenberg[(m, m - 1)], d.basis.get(m)).unwrap();
        assert!(max_block_diff(&mv, &Basis::new(split).unwrap()) < 1e-10);

        // 𝕍_mᵀ ◊ ℳ(𝕍_m) = H_m and 𝕍_{m+1}ᵀ ◊ ℳ(𝕍_m) = H̃_m
        assert!(diamond(&v_m, &mv).unwrap().max_abs_diff(&d.square_hessenberg()) < 1e-10);
        assert!(diamond(&d.basis, &mv).unwrap().max_abs_diff(&d.hessenberg) < 1e-10);

        // 𝕍ᵀ ◊ 𝕍 = I and ‖𝕍 ⊛ y‖ = ‖y‖
        assert!(diamond(&d.basis, &d.basis).unwrap().max_abs_diff(&Mat::identity(m + 1)) < 1e-10);
        let y: Vec<f64> = (0..m + 1).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((d.basis.combine(&y).unwrap().fro_norm() - ny).abs() < 1e-10);
    }
}

#[test]
fn arnoldi_on_ill_conditioned_operator_stays_orthonormal() {
    let mut r = rng(22);
    let op = well_conditioned(8, 2, 3, &mut r);
    // Squaring the operator a few times spreads its spectrum.
    let a = op.tensor().clone();
    let a4 = dctensor::cosine_product(&a, &dctensor::cosine_product(&a, &a).unwrap()).unwrap();
    let op = LeftProductOperator::new(a4, 2).unwrap();
    let d = arnoldi(&op, &randn(8, 2, 3, &mut r), 20).unwrap();
    let k = d.basis.len();
    assert!(diamond(&d.basis, &d.basis).unwrap().max_abs_diff(&Mat::identity(k)) < 1e-10);
}

#[test]
fn proposition_two_relations() {
    let mut r = rng(23);
    for _ in 0..5 {
        let op = LeftProductOperator::new(randn(6, 5, 3, &mut r), 2).unwrap();
        let c = randn(6, 2, 3, &mut r);
        let m = 4;
        let d = golub_kahan(&op, &c, m).unwrap();
        assert_eq!(d.steps(), m);
        let v_m = d.v_basis.truncated(m);
        let mv = v_m.map(|v| op.apply(v)).unwrap();

        // ℳ(𝕍_m) = 𝕌_{m+1} ⊛ C̃_m
        let uc = d.u_basis.combine_matrix(&d.bidiag).unwrap();
        assert!(max_block_diff(&mv, &uc) < 1e-10);

        // 𝕌_{m+1} ⊛ (β₁e₁) = C
        let mut e1 = vec![0.0; m + 1];
        e1[0] = d.beta1;
        assert!(d.u_basis.combine(&e1).unwrap().sub(&c).unwrap().fro_norm() < 1e-12 * d.beta1);

        // ℳᵀ(𝕌_{m+1}) = 𝕍_{m+1} ⊛ [C̃_m  α_{m+1}e_{m+1}]ᵀ, the standard adjoint form
        assert_eq!(d.v_basis.len(), m + 1);
        let alpha_next = {
            let w = op.apply_adjoint(d.u_basis.get(m)).unwrap();
            d.v_basis.get(m).inner(&w).unwrap()
        };
        let full = Mat::from_fn(m + 1, m + 1, |i, j| {
            if j < m {
                d.bidiag[(i, j)]
            } else if i == m {
                alpha_next
            } else {
                0.0
            }
        });
        let mtu = d.u_basis.map(|u| op.apply_adjoint(u)).unwrap();
        let vct = d.v_basis.combine_matrix(&full.transpose()).unwrap();
        assert!(max_block_diff(&mtu, &vct) < 1e-10);

        // 𝕌ᵀ ◊ 𝕌 = I, 𝕍ᵀ ◊ 𝕍 = I
        assert!(
            diamond(&d.u_basis, &d.u_basis)
                .unwrap()
                .max_abs_diff(&Mat::identity(m + 1))
                < 1e-10
        );
        assert!(
            diamond(&d.v_basis, &d.v_basis)
                .unwrap()
                .max_abs_diff(&Mat::identity(m + 1))
                < 1e-10
        );

        let b = &d.bidiag;
        for i in 0..m + 1 {
            for j in 0..m {
                if i != j && i != j + 1 {
                    assert_eq!(b[(i, j)], 0.0);
                }
            }
        }
    }
}
