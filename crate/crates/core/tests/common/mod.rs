#![allow(dead_code)]

use dctensor::solvers::{LeftProductOperator, LinearTensorOperator};
use dctensor::{make_transform, Direction, Mat, Tensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(n1: usize, n2: usize, n3: usize, r: &mut ChaCha8Rng) -> Tensor {
    Tensor::random_normal(n1, n2, n3, r).unwrap()
}

/// `X ↦ A ⋆c X` whose transformed slices are `2I + 0.2·G/√n`.
pub fn well_conditioned(n: usize, s: usize, p: usize, r: &mut ChaCha8Rng) -> LeftProductOperator<f64> {
    let g = randn(n, n, p, r);
    let scale = 0.2 / (n as f64).sqrt();
    let hat = Tensor::from_fn(n, n, p, |i, j, k| {
        scale * g.get(i, j, k) + if i == j { 2.0 } else { 0.0 }
    })
    .unwrap();
    let t = make_transform::<f64>(p).unwrap();
    let a = t.apply(&hat, Direction::Inverse).unwrap();
    LeftProductOperator::new(a, s).unwrap()
}

/// Dense matrix of an operator in the tensors' storage order.
pub fn dense_of<O: LinearTensorOperator<f64>>(op: &O) -> Mat {
    let d = op.domain_dims();
    let r = op.range_dims();
    let mut m = Mat::zeros(r.len(), d.len());
    for c in 0..d.len() {
        let mut e = vec![0.0; d.len()];
        e[c] = 1.0;
        let x = Tensor::from_vec(d.n1, d.n2, d.n3, e).unwrap();
        let y = op.apply(&x).unwrap();
        m.column_mut(c).copy_from_slice(y.as_slice());
    }
    m
}
