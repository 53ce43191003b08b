//! Instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use circarma::harmonics::{grid, moments_of};
use circarma::linalg::CMat;
use circarma::multivar::MatrixPseudoPolynomial;
use circarma::{Complex64, DiscreteSpectrum, PseudoPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p_0 = 1` and `sum_k |p_k| = spread`, so `P >= 1 - 2 spread` on the whole circle.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, spread: f64, complex: bool) -> PseudoPolynomial {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    let raw: Vec<Complex64> = (0..n)
        .map(|_| {
            let im = if complex {
                rng.random_range(-1.0..1.0)
            } else {
                0.0
            };
            Complex64::new(rng.random_range(-1.0..1.0), im)
        })
        .collect();
    let total: f64 = raw.iter().map(|z| z.norm()).sum::<f64>().max(1e-12);
    c.extend(raw.iter().map(|z| z * (spread / total)));
    PseudoPolynomial::new(c).unwrap()
}

/// Random Hermitian positive definite matrix pseudo-polynomial (`Q_0` dominant).
pub fn random_block_poly(rng: &mut ChaCha8Rng, m: usize, n: usize) -> MatrixPseudoPolynomial {
    let mut coeffs = Vec::new();
    let mut q0 = CMat::identity(m, m) * Complex64::new(2.0, 0.0);
    for i in 0..m {
        for j in i + 1..m {
            let z = Complex64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            q0[(i, j)] = z;
            q0[(j, i)] = z.conj();
        }
    }
    coeffs.push(q0);
    for _ in 0..n {
        coeffs.push(CMat::from_fn(m, m, |_, _| {
            Complex64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)) / (n as f64)
        }));
    }
    MatrixPseudoPolynomial::new(coeffs).unwrap()
}

/// Lags of the continuous spectrum `P/Q`, integrated on a fine grid.
pub fn continuous_lags(p: &PseudoPolynomial, q: &PseudoPolynomial, n: usize) -> Vec<Complex64> {
    let fine = grid(4096).unwrap();
    let phi = DiscreteSpectrum::rational(&fine, p, q).unwrap();
    moments_of(&phi, n).unwrap()
}

/// `|b(z)|^2` for `b(z) = prod_i (1 - r_i z^{-1})`, as a pseudo-polynomial.
pub fn from_roots(roots: &[Complex64]) -> PseudoPolynomial {
    let mut b = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); b.len() + 1];
        for (k, &c) in b.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * r;
        }
        b = next;
    }
    let n = b.len() - 1;
    let coeffs = (0..=n)
        .map(|k| (k..=n).map(|j| b[j] * b[j - k].conj()).sum())
        .collect();
    PseudoPolynomial::new(coeffs).unwrap()
}

/// Conjugate pairs `rho e^{+-i theta}`.
pub fn conjugate_pairs(pairs: &[(f64, f64)]) -> Vec<Complex64> {
    pairs
        .iter()
        .flat_map(|&(rho, th)| {
            [
                Complex64::from_polar(rho, th),
                Complex64::from_polar(rho, -th),
            ]
        })
        .collect()
}

/// Direct `(1/2N) sum_j f(zeta_j) e^{i k theta_j}` with angles from scratch.
pub fn direct_moment(half_period: usize, f: &[f64], k: i64) -> Complex64 {
    let len = 2 * half_period;
    (0..len)
        .map(|s| {
            let j = s as i64 - half_period as i64 + 1;
            let th = std::f64::consts::PI * (j * k) as f64 / half_period as f64;
            Complex64::from_polar(f[s], th)
        })
        .sum::<Complex64>()
        / len as f64
}

/// Direct grid evaluation of `P(e^{i theta})` from the coefficient formula.
pub fn direct_eval(p: &PseudoPolynomial, half_period: usize) -> Vec<f64> {
    (0..2 * half_period)
        .map(|s| {
            let j = s as i64 - half_period as i64 + 1;
            let th = std::f64::consts::PI * j as f64 / half_period as f64;
            let mut v = p.coeff(0).re;
            for k in 1..=p.degree() as i64 {
                v += 2.0 * (p.coeff(k) * Complex64::from_polar(1.0, -(k as f64) * th)).re;
            }
            v
        })
        .collect()
}
