mod common;

use common::{randn, rng};
use dctensor::imaging::{
    add_noise, build_blur_operator, gaussian_band_matrix, kron_oracle, BlurModel, BlurProblem, CrossChannelSpec,
    GaussianBlurSpec, Pattern,
};
use dctensor::io::{load_ct3, save_ct3};
use dctensor::solvers::{adjoint_check, LinearTensorOperator};
use dctensor::{make_transform, Mat, Tensor};

fn blur_mats(n: usize, sigma: f64, r: usize) -> (Mat, Mat) {
    let g = gaussian_band_matrix(&GaussianBlurSpec::new(n, sigma, r).unwrap()).unwrap();
    (g.clone(), g)
}

/// Channel mixing actually realized by the tensor form with first-column
/// coefficients `a`: `M⁻¹ diag(M a) M`.
fn realized_mixing(a: [f64; 3]) -> Mat {
    let t = make_transform::<f64>(3).unwrap();
    let ma = t.forward().matvec(&a).unwrap();
    t.inverse()
        .matmul(&Mat::diag(&ma))
        .unwrap()
        .matmul(t.forward())
        .unwrap()
}

fn mix_channels(a1: &Mat, a2: &Mat, k: &Mat, x: &Tensor) -> Tensor {
    let n = x.n1();
    let blurred: Vec<Mat> = (0..3)
        .map(|d| a2.matmul(&x.frontal_slice(d)).unwrap().matmul(&a1.transpose()).unwrap())
        .collect();
    Tensor::from_fn(n, n, 3, |i, j, c| (0..3).map(|d| k[(c, d)] * blurred[d][(i, j)]).sum()).unwrap()
}

#[test]
fn tensor_form_without_mixing_matches_kronecker_model() {
    let mut r = rng(61);
    let (a1, a2) = blur_mats(8, 2.0, 3);
    let cross = CrossChannelSpec::identity();
    let (_, _, op) = build_blur_operator(&a1, &a2, &cross).unwrap();
    for _ in 0..5 {
        let x = randn(8, 8, 3, &mut r);
        let lin = kron_oracle(&a1, &a2, &cross, &x).unwrap();
        assert!(op.apply(&x).unwrap().relative_diff(&lin).unwrap() < 1e-12);
    }
}

/// With channel mixing the tensor form applies `M⁻¹ diag(M a) M` across
/// channels, which differs from `A_color` for the circular mixing matrices.
#[test]
fn tensor_form_mixes_with_transform_conjugate() {
    let mut r = rng(62);
    let (a1, a2) = blur_mats(8, 2.0, 3);
    let cross = CrossChannelSpec::paper();
    let (_, _, op) = build_blur_operator(&a1, &a2, &cross).unwrap();
    let k = realized_mixing([0.8, 0.1, 0.1]);
    let expect = Mat::from_rows(&[vec![0.8, 0.4, 0.4], vec![0.1, 0.7, -0.1], vec![0.1, 0.3, 1.1]]).unwrap();
    assert!(k.max_abs_diff(&expect) < 1e-12);
    for _ in 0..5 {
        let x = randn(8, 8, 3, &mut r);
        let y = op.apply(&x).unwrap();
        assert!(y.relative_diff(&mix_channels(&a1, &a2, &k, &x)).unwrap() < 1e-12);
        let lin = kron_oracle(&a1, &a2, &cross, &x).unwrap();
        assert!(y.relative_diff(&lin).unwrap() > 1e-2);
    }
}

#[test]
fn built_operator_adjoint() {
    let mut r = rng(63);
    let (a1, a2) = blur_mats(12, 2.0, 3);
    let (_, _, op) = build_blur_operator(&a1, &a2, &CrossChannelSpec::paper()).unwrap();
    assert!(adjoint_check(&op, 5, &mut r).unwrap() <= 1e-10);
}

#[test]
fn kronecker_model_preserves_channel_means_in_the_interior() {
    let n = 16;
    let spec = GaussianBlurSpec::new(n, 1.5, 3).unwrap();
    let g: Mat = gaussian_band_matrix(&spec).unwrap();
    // Interior rows of the band matrix sum to the same value; normalize it out.
    let row: f64 = (0..n).map(|l| g[(n / 2, l)]).sum();
    let g = Mat::from_fn(n, n, |i, j| g[(i, j)] / row);
    let levels = [0.2, 0.5, 0.9];
    let x = Tensor::from_fn(n, n, 3, |_, _, k| levels[k]).unwrap();
    let cross = CrossChannelSpec::paper();
    let y = kron_oracle(&g, &g, &cross, &x).unwrap();
    let m = cross.matrix();
    for (c, row) in m.iter().enumerate() {
        let expect: f64 = row.iter().zip(&levels).map(|(a, b)| a * b).sum();
        for i in 4..n - 4 {
            for j in 4..n - 4 {
                assert!((y.get(i, j, c) - expect).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn noise_and_problem_contracts() {
    let model = BlurModel::symmetric(32, 4.0, 6, CrossChannelSpec::paper()).unwrap();
    let truth: Tensor = Pattern::RandomSmooth.render(32, 5).unwrap();
    let p = BlurProblem::synthesize(truth, model, 1e-2, 5).unwrap();
    assert!((p.realized_noise_level().unwrap() - 1e-2).abs() <= 1e-12 * 1e-2);
    let q = BlurProblem::synthesize(p.ground_truth.clone(), model, 1e-2, 5).unwrap();
    assert_eq!(p.observed, q.observed);
    let (_, n1) = add_noise(&p.blurred_clean, 1e-3, 1).unwrap();
    let (_, n2) = add_noise(&p.blurred_clean, 1e-3, 2).unwrap();
    assert_ne!(n1, n2);
}

#[test]
fn ct3_round_trip_on_disk() {
    let mut r = rng(64);
    let t = randn(5, 4, 3, &mut r);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ct3");
    save_ct3(&t, &path).unwrap();
    assert_eq!(load_ct3::<f64>(&path).unwrap(), t);
}
