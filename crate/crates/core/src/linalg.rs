//! Small dense helpers shared by the geometry modules.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

use crate::jet::Jet;
use crate::{Error, Result};

pub type Vector = Array1<f64>;
pub type Matrix = Array2<f64>;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_na(m: &DMatrix<f64>) -> Matrix {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    to_na(m).try_inverse().map(|inv| from_na(&inv))
}

pub fn determinant(m: &Matrix) -> f64 {
    to_na(m).determinant()
}

/// Counts (positive, negative, near-zero) eigenvalues of a symmetric matrix.
pub fn inertia(m: &Matrix, tol: f64) -> (usize, usize, usize) {
    let sym = (&to_na(m) + to_na(m).transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    let mut counts = (0, 0, 0);
    for &e in eig.iter() {
        if e > tol * scale {
            counts.0 += 1;
        } else if e < -tol * scale {
            counts.1 += 1;
        } else {
            counts.2 += 1;
        }
    }
    counts
}

/// Singular values, largest first.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

pub fn values(m: &[Vec<Jet>]) -> Matrix {
    let n = m.len();
    Array2::from_shape_fn((n, n), |(i, j)| m[i][j].value())
}

/// Gauss-Jordan inversion over jets, pivoting on constant terms.
pub fn invert_jets(m: &[Vec<Jet>], point: &[f64]) -> Result<Vec<Vec<Jet>>> {
    let n = m.len();
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m[0][0].constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |s, j| s.max(j.value().abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[x][col]
                    .value()
                    .abs()
                    .partial_cmp(&a[y][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot][col].value().abs() <= 1e-13 * scale {
            return Err(Error::SingularMetric(point.to_vec()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            if factor.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..n {
                let t = &factor * &a[col][j];
                a[row][j] = &a[row][j] - &t;
                let t = &factor * &inv[col][j];
                inv[row][j] = &inv[row][j] - &t;
            }
        }
    }
    Ok(inv)
}
