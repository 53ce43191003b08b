//! Deterministic fixtures for the solver benchmarks.

use circarma::harmonics::moments_of;
use circarma::multivar::{block_moments, block_spectrum};
use circarma::{
    grid, CMat, Complex64, CovarianceData, DiscreteSpectrum, MatrixPseudoPolynomial,
    PseudoPolynomial,
};

/// `1 + sum_k w_k (z^k + z^-k)` with geometrically decaying complex `w_k`
/// whose magnitudes sum to `spread < 1/2`, so the symbol stays positive.
pub fn decaying(n: usize, spread: f64, phase: f64) -> PseudoPolynomial {
    let weights: Vec<f64> = (1..=n).map(|k| 0.6f64.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mut c = vec![Complex64::new(1.0, 0.0)];
    c.extend(
        weights
            .iter()
            .enumerate()
            .map(|(k, w)| Complex64::from_polar(spread * w / total, phase * (k + 1) as f64)),
    );
    PseudoPolynomial::new(c).expect("first coefficient is real")
}

/// Scalar instance `(P, Q, c)` with `c` the lags of `P/Q` on the grid.
pub fn scalar_fixture(
    half: usize,
    n: usize,
) -> (PseudoPolynomial, PseudoPolynomial, CovarianceData) {
    let p = decaying(n, 0.3, 0.7);
    let q = decaying(n, 0.4, -1.3);
    let phi = DiscreteSpectrum::rational(&grid(half).unwrap(), &p, &q).unwrap();
    let c = CovarianceData::scalar(half, &moments_of(&phi, n).unwrap()).unwrap();
    (p, q, c)
}

/// Block instance with `m x m` lags of `P Q^{-1}` on the grid.
pub fn block_fixture(half: usize, m: usize, n: usize) -> (PseudoPolynomial, CovarianceData) {
    let p = decaying(n, 0.3, 0.7);
    let mut coeffs = vec![CMat::identity(m, m) * Complex64::new(2.0, 0.0)];
    for k in 1..=n {
        let scale = 0.3 / (n as f64) * 0.7f64.powi(k as i32);
        coeffs.push(CMat::from_fn(m, m, |i, j| {
            Complex64::from_polar(scale, (i + 2 * j + k) as f64)
        }));
    }
    let q = MatrixPseudoPolynomial::new(coeffs).unwrap();
    let circle = grid(half).unwrap();
    let phi = block_spectrum(&circle, &p, &q).unwrap();
    let c = CovarianceData::new(half, block_moments(&circle, &phi, n).unwrap()).unwrap();
    (p, c)
}
