//! Small dense helpers on top of nalgebra for the per-grid-point matrix work.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Asymmetry below this (relative to the entry scale) is symmetrized away.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn cidentity(m: usize) -> CMat {
    CMat::identity(m, m)
}

pub fn cscalar(m: usize, v: Complex64) -> CMat {
    CMat::identity(m, m) * v
}

/// Largest entry modulus.
pub fn max_abs(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of `x - x^*`.
pub fn asymmetry(x: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.nrows() {
        for j in i..x.ncols() {
            worst = worst.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(x: &CMat) -> bool {
    x.is_square() && asymmetry(x) <= HERMITIAN_TOL * max_abs(x).max(1.0)
}

/// `(x + x^*)/2`, failing when `x` is visibly non-Hermitian.
pub fn hermitize(x: &CMat, index: i64) -> Result<CMat> {
    let asym = asymmetry(x);
    if asym > HERMITIAN_TOL * max_abs(x).max(1.0) {
        return Err(Error::NotHermitian {
            index,
            asymmetry: asym,
        });
    }
    Ok((x + x.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues real, ascending order not guaranteed).
pub fn hermitian_eigen(x: &CMat) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    SymmetricEigen::new(x.clone())
}

/// Applies a real function to the eigenvalues of a Hermitian matrix.
pub fn hermitian_map(x: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let eig = hermitian_eigen(x);
    let mut d = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = Complex64::new(f(lam), 0.0);
        for i in 0..d.nrows() {
            d[(i, j)] *= v;
        }
    }
    let out = d * eig.eigenvectors.adjoint();
    (&out + out.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn min_eigenvalue(x: &CMat) -> f64 {
    hermitian_eigen(x)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Inverse and log-determinant of a Hermitian positive definite matrix.
/// Returns `None` when the smallest eigenvalue is below `floor`.
pub fn hpd_inverse_logdet(x: &CMat, floor: f64) -> Option<(CMat, f64)> {
    let eig = hermitian_eigen(x);
    let mut logdet = 0.0;
    for &lam in eig.eigenvalues.iter() {
        if !(lam > floor) {
            return None;
        }
        logdet += lam.ln();
    }
    let mut d = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = Complex64::new(1.0 / lam, 0.0);
        for i in 0..d.nrows() {
            d[(i, j)] *= v;
        }
    }
    let inv = d * eig.eigenvectors.adjoint();
    let inv = (&inv + inv.adjoint()) * Complex64::new(0.5, 0.0);
    Some((inv, logdet))
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue_real(h: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Solves `h x = g` for a symmetric positive definite `h`, adding a small
/// diagonal shift when Cholesky fails on a numerically indefinite matrix.
pub fn spd_solve(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        return Some(ch.solve(g));
    }
    let scale = h
        .diagonal()
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut shift = 1e-12 * scale;
    for _ in 0..12 {
        let mut hs = h.clone();
        for i in 0..hs.nrows() {
            hs[(i, i)] += shift;
        }
        if let Some(ch) = hs.cholesky() {
            return Some(ch.solve(g));
        }
        shift *= 10.0;
    }
    None
}

/// Condition number estimate of a symmetric matrix from its eigenvalues.
pub fn condition_number(h: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(h.clone()).eigenvalues;
    let max = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = eig.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Hermitian positive definiteness of a dense complex matrix via Cholesky
/// with a relative pivot threshold.
pub fn is_positive_definite(x: &CMat, rel_pivot: f64) -> bool {
    let n = x.nrows();
    if n == 0 {
        return true;
    }
    let scale = max_abs(x);
    if scale == 0.0 {
        return false;
    }
    let threshold = rel_pivot * scale;
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = x[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > threshold) {
            return false;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = x[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    true
}
