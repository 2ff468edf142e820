//! Small dense kernels: semidefinite Cholesky and triangular solves.
//!
//! Matrices are row-major `Vec<f64>` of size `n * n`.

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a symmetric positive semidefinite matrix.
///
/// Pivots within `-tol` of zero are treated as exact zeros so that rank-deficient
/// correlation matrices (e.g. perfect correlation) factor successfully.
pub fn cholesky_psd(a: &[f64], n: usize, tol: f64) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d < -tol {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (pivot {d:e} at {j})"
            )));
        }
        let d = d.max(0.0).sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = if d > 0.0 {
                s / d
            } else if s.abs() <= tol {
                0.0
            } else {
                return Err(Error::invalid(
                    "matrix is not positive semidefinite (inconsistent zero pivot)",
                ));
            };
        }
    }
    Ok(l)
}

/// Strict Cholesky; fails unless every pivot is strictly positive.
pub fn cholesky_pd(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

/// Solve `L L^T x = b` in place given the Cholesky factor `L`.
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// `y = L x` for a lower-triangular `L`.
pub fn lower_mul(l: &[f64], n: usize, x: &[f64], y: &mut [f64]) {
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[i * n + k] * x[k];
        }
        y[i] = s;
    }
}
