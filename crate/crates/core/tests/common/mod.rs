#![allow(dead_code)]

use uzawa_cavity::oracle::DenseMatrix;
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile, StokesSystem};

pub fn cavity(n: usize) -> StokesSystem {
    build_mac_stokes(n, LidProfile::Regularized).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `sqrt(h² Σ (aᵢ − bᵢ)²)`
pub fn diff_norm_h(a: &[f64], b: &[f64], h: f64) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn dense_dot(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    a.matvec(x).unwrap()
}

pub fn to_nalgebra(a: &DenseMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |r, c| a[(r, c)])
}
