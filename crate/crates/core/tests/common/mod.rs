#![allow(dead_code)]

use std::sync::Arc;

use dpsbp::operators::{build_operator_pair, Family, Grid1D, SbpOperatorPair};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn grid(n: usize, length: f64, periodic: bool) -> Grid1D {
    if periodic {
        Grid1D::periodic(n, length).unwrap()
    } else {
        Grid1D::bounded(n, length).unwrap()
    }
}

pub fn pair(family: Family, order: usize, periodic: bool, n: usize, length: f64) -> Arc<SbpOperatorPair> {
    Arc::new(build_operator_pair(family, order, periodic, &grid(n, length, periodic)).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(lo..hi)).collect()
}

pub fn to_mat(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

/// Columns `op(e_j)`: the dense matrix of a linear map.
pub fn assemble(n: usize, mut op: impl FnMut(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op(&e);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

pub fn mat_vec(m: &DMatrix<f64>, f: &[f64]) -> Vec<f64> {
    (m * nalgebra::DVector::from_column_slice(f)).as_slice().to_vec()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn weighted(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    p.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum()
}

/// `A ⊗ B` for row-major index `i·n_b + j`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}
