//! Block-circulant matrices held by their symbol values on the grid.
//!
//! A `2mN x 2mN` block-circulant matrix `M = sum_k S^{-k} (x) M_k` is stored
//! as the 2N values `M(zeta_j) = sum_k M_k zeta_j^{-k}`. Products, sums,
//! inverses and logarithms act pointwise on those values; the coefficient
//! form and the dense matrix are derived on demand for checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::{DiscreteCircle, PseudoPolynomial};
use crate::linalg::{self, CMat};

/// Default cap on the side length of dense materializations.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "CIRCARMA_DENSE_CAP";

/// Default bandedness tolerance, relative to the largest entry of `M_0`.
pub const BANDED_TOL: f64 = 1e-8;

pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Debug, Clone)]
pub struct CirculantMatrix {
    circle: DiscreteCircle,
    block: usize,
    values: Vec<CMat>,
}

/// The cyclic (block) shift `S (x) I_m`, whose symbol is `zeta`.
#[derive(Debug, Clone)]
pub struct ShiftMatrix {
    circle: DiscreteCircle,
    block: usize,
}

impl ShiftMatrix {
    pub fn new(circle: &DiscreteCircle, block: usize) -> Self {
        Self {
            circle: circle.clone(),
            block,
        }
    }

    pub fn to_circulant(&self) -> CirculantMatrix {
        let values = (0..self.circle.len())
            .map(|s| linalg::cscalar(self.block, self.circle.power(s, 1)))
            .collect();
        CirculantMatrix {
            circle: self.circle.clone(),
            block: self.block,
            values,
        }
    }

    /// `S^k`; `S^{2N}` is the identity.
    pub fn pow(&self, k: i64) -> CirculantMatrix {
        let values = (0..self.circle.len())
            .map(|s| linalg::cscalar(self.block, self.circle.power(s, k)))
            .collect();
        CirculantMatrix {
            circle: self.circle.clone(),
            block: self.block,
            values,
        }
    }

    pub fn dense(&self) -> Result<CMat> {
        self.to_circulant().dense()
    }
}

/// Unitary factor and symbol values with `dense(M) = F^* diag(M(zeta_j)) F`.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub circle: DiscreteCircle,
    pub block: usize,
    pub values: Vec<CMat>,
}

impl Diagonalization {
    /// The unitary matrix with block entries `zeta_j^{-t} I_m / sqrt(2N)`.
    pub fn fourier(&self) -> Result<CMat> {
        fourier_matrix(&self.circle, self.block)
    }

    /// Block-diagonal matrix of the symbol values.
    pub fn block_diagonal(&self) -> CMat {
        let m = self.block;
        let len = self.circle.len();
        let mut d = CMat::zeros(len * m, len * m);
        for (s, v) in self.values.iter().enumerate() {
            d.view_mut((s * m, s * m), (m, m)).copy_from(v);
        }
        d
    }
}

pub fn fourier_matrix(circle: &DiscreteCircle, block: usize) -> Result<CMat> {
    let len = circle.len();
    check_cap(len * block)?;
    let scale = 1.0 / (len as f64).sqrt();
    let mut f = CMat::zeros(len * block, len * block);
    for j in 0..len {
        for t in 0..len {
            let v = circle.power(j, -circle.index(t)) * scale;
            for i in 0..block {
                f[(j * block + i, t * block + i)] = v;
            }
        }
    }
    Ok(f)
}

fn check_cap(size: usize) -> Result<()> {
    let cap = dense_cap();
    if size > cap {
        return Err(Error::DenseCapExceeded { size, cap });
    }
    Ok(())
}

/// Result of a bandedness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandedReport {
    pub banded: bool,
    /// Largest entry modulus among coefficients with `|k| > n`.
    pub residual: f64,
    /// Threshold the residual was compared against.
    pub threshold: f64,
}

impl CirculantMatrix {
    /// From symbol values in slot order.
    pub fn from_values(circle: &DiscreteCircle, values: Vec<CMat>) -> Result<Self> {
        if values.len() != circle.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} symbol values, got {}",
                circle.len(),
                values.len()
            )));
        }
        let block = values[0].nrows();
        if block == 0
            || values
                .iter()
                .any(|v| v.nrows() != block || v.ncols() != block)
        {
            return Err(Error::DimensionMismatch(
                "symbol values must be square blocks of equal size".into(),
            ));
        }
        Ok(Self {
            circle: circle.clone(),
            block,
            values,
        })
    }

    /// Scalar circulant from real grid values.
    pub fn from_scalar_values(circle: &DiscreteCircle, values: &[f64]) -> Result<Self> {
        Self::from_values(
            circle,
            values
                .iter()
                .map(|&v| CMat::from_element(1, 1, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    /// From coefficients `M_{-N+1}, ..., M_N` in slot order.
    pub fn from_coefficients(circle: &DiscreteCircle, coeffs: &[CMat]) -> Result<Self> {
        if coeffs.len() != circle.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                circle.len(),
                coeffs.len()
            )));
        }
        let block = coeffs[0].nrows();
        let values = (0..circle.len())
            .map(|s| {
                let mut acc = CMat::zeros(block, block);
                for (sk, ck) in coeffs.iter().enumerate() {
                    acc += ck * circle.power(s, -circle.index(sk));
                }
                acc
            })
            .collect();
        Self::from_values(circle, values)
    }

    /// Banded Hermitian block-circulant from `M_0..M_n` with `M_{-k} = M_k^*`.
    pub fn from_banded(circle: &DiscreteCircle, coeffs: &[CMat]) -> Result<Self> {
        let n = coeffs.len().saturating_sub(1);
        if coeffs.is_empty() || n >= circle.half_period() {
            return Err(Error::DegreeTooLarge {
                degree: n,
                half_period: circle.half_period(),
            });
        }
        let values = (0..circle.len())
            .map(|s| {
                let mut acc = coeffs[0].clone();
                for (k, ck) in coeffs.iter().enumerate().skip(1) {
                    let z = circle.power(s, -(k as i64));
                    acc += ck * z + ck.adjoint() * z.conj();
                }
                acc
            })
            .collect();
        Self::from_values(circle, values)
    }

    /// Scalar circulant with the given symbol.
    pub fn from_symbol(circle: &DiscreteCircle, p: &PseudoPolynomial) -> Result<Self> {
        Self::scalar_kron(circle, p, 1)
    }

    /// `P (x) I_m` for a scalar pseudo-polynomial `P`.
    pub fn scalar_kron(
        circle: &DiscreteCircle,
        p: &PseudoPolynomial,
        block: usize,
    ) -> Result<Self> {
        let values = crate::harmonics::eval_symbol(p, circle)?;
        Self::from_values(
            circle,
            values
                .into_iter()
                .map(|v| linalg::cscalar(block, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub fn identity(circle: &DiscreteCircle, block: usize) -> Self {
        Self {
            circle: circle.clone(),
            block,
            values: vec![linalg::cidentity(block); circle.len()],
        }
    }

    pub fn circle(&self) -> &DiscreteCircle {
        &self.circle
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    /// Scalar symbol values (real parts), for `m = 1`.
    pub fn scalar_values(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| v[(0, 0)]).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.values.iter().all(linalg::is_hermitian)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.circle != other.circle || self.block != other.block {
            return Err(Error::DimensionMismatch(format!(
                "circulant shapes differ: (N={}, m={}) vs (N={}, m={})",
                self.circle.half_period(),
                self.block,
                other.circle.half_period(),
                other.block
            )));
        }
        Ok(())
    }

    // Re-symmetrizes values that should be Hermitian.
    fn hermitized(self, hermitian: bool) -> Result<Self> {
        if !hermitian {
            return Ok(self);
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(s, v)| linalg::hermitize(v, self.circle.index(s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values, ..self })
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            circle: self.circle.clone(),
            block: self.block,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let herm = self.is_hermitian() && other.is_hermitian();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            circle: self.circle.clone(),
            block: self.block,
            values,
        }
        .hermitized(herm)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            circle: self.circle.clone(),
            block: self.block,
            values: self
                .values
                .iter()
                .map(|v| v * Complex64::new(factor, 0.0))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            circle: self.circle.clone(),
            block: self.block,
            values: self.values.iter().map(|v| v.adjoint()).collect(),
        }
    }

    /// Pointwise inverse; fails on the first singular grid value.
    pub fn inverse(&self) -> Result<Self> {
        let herm = self.is_hermitian();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(s, v)| {
                let scale = linalg::max_abs(v);
                let inv = v
                    .clone()
                    .try_inverse()
                    .filter(|inv| scale > 0.0 && linalg::max_abs(inv) * scale < 1e14)
                    .ok_or(Error::Singular {
                        index: self.circle.index(s),
                    })?;
                Ok(inv)
            })
            .collect::<Result<Vec<_>>>()?;
        Self {
            circle: self.circle.clone(),
            block: self.block,
            values,
        }
        .hermitized(herm)
    }

    /// Matrix logarithm via the Hermitian eigen-decomposition of each value.
    pub fn log(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(s, v)| {
                let idx = self.circle.index(s);
                let h = linalg::hermitize(v, idx)?;
                let min = linalg::min_eigenvalue(&h);
                if !(min > 0.0) {
                    return Err(Error::NotPositiveDefinite {
                        index: idx,
                        min_eig: min,
                    });
                }
                Ok(linalg::hermitian_map(&h, f64::ln))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            circle: self.circle.clone(),
            block: self.block,
            values,
        })
    }

    /// Matrix exponential of a Hermitian circulant.
    pub fn exp(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(s, v)| {
                let h = linalg::hermitize(v, self.circle.index(s))?;
                Ok(linalg::hermitian_map(&h, f64::exp))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            circle: self.circle.clone(),
            block: self.block,
            values,
        })
    }

    pub fn diagonalize(&self) -> Diagonalization {
        Diagonalization {
            circle: self.circle.clone(),
            block: self.block,
            values: self.values.clone(),
        }
    }

    /// `trace(dense(self) dense(other))` computed on symbol values. The sum
    /// runs over grid points in slot order.
    pub fn trace_form(&self, other: &Self) -> Result<f64> {
        Ok(self.trace_form_complex(other)?.re)
    }

    pub fn trace_form_complex(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += (a * b).trace();
        }
        Ok(acc)
    }

    /// Coefficient `M_k` for `|k| <= N`.
    pub fn coefficient(&self, k: i64) -> Result<CMat> {
        if k.unsigned_abs() as usize > self.circle.half_period() {
            return Err(Error::IndexOutOfRange {
                index: k,
                limit: self.circle.half_period(),
            });
        }
        let mut acc = CMat::zeros(self.block, self.block);
        for (s, v) in self.values.iter().enumerate() {
            acc += v * self.circle.power(s, k);
        }
        Ok(acc / Complex64::new(self.circle.len() as f64, 0.0))
    }

    /// All coefficients `M_{-N+1}..M_N` in slot order.
    pub fn coefficients(&self) -> Vec<CMat> {
        self.circle
            .indices()
            .map(|k| self.coefficient(k).expect("index within range"))
            .collect()
    }

    /// Tests `M_k = 0` for `n < |k|`, with threshold `tol * max|M_0|`.
    pub fn is_banded(&self, n: usize, tol: f64) -> Result<BandedReport> {
        if n >= self.circle.half_period() {
            return Err(Error::DegreeTooLarge {
                degree: n,
                half_period: self.circle.half_period(),
            });
        }
        let coeffs = self.coefficients();
        let m0 = linalg::max_abs(&coeffs[self.circle.slot(0)]);
        let threshold = if m0 > 0.0 { tol * m0 } else { tol };
        let residual = self
            .circle
            .indices()
            .zip(&coeffs)
            .filter(|(k, _)| k.unsigned_abs() as usize > n)
            .map(|(_, c)| linalg::max_abs(c))
            .fold(0.0, f64::max);
        Ok(BandedReport {
            banded: residual <= threshold,
            residual,
            threshold,
        })
    }

    /// Dense `2mN x 2mN` matrix; block `(s, t)` equals `M_{s-t}`.
    pub fn dense(&self) -> Result<CMat> {
        let len = self.circle.len();
        let m = self.block;
        check_cap(len * m)?;
        let coeffs = self.coefficients();
        let mut out = CMat::zeros(len * m, len * m);
        for s in 0..len {
            for t in 0..len {
                let k = s as i64 - t as i64;
                let c = &coeffs[self.circle.slot(k)];
                out.view_mut((s * m, t * m), (m, m)).copy_from(c);
            }
        }
        Ok(out)
    }

    /// Largest entry modulus of the difference of symbol values.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::grid;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_symbol_and_dense() {
        let circle = grid(3).unwrap();
        let id = CirculantMatrix::identity(&circle, 2);
        assert!(id
            .diagonalize()
            .values
            .iter()
            .all(|v| linalg::max_abs(&(v - linalg::cidentity(2))) == 0.0));
        let d = id.dense().unwrap();
        assert!(linalg::max_abs(&(d - CMat::identity(12, 12))) < 1e-15);
        let inv = id.inverse().unwrap();
        assert!(inv.max_abs_diff(&id).unwrap() < 1e-15);
        let r = id.is_banded(1, BANDED_TOL).unwrap();
        assert!(r.banded);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn shift_symbol_is_zeta() {
        let circle = grid(4).unwrap();
        let s = ShiftMatrix::new(&circle, 1);
        let values = s.to_circulant().scalar_values();
        for (slot, v) in values.iter().enumerate() {
            assert_eq!(*v, circle.power(slot, 1));
        }
        // S has ones at (i, i+1)
        let d = s.dense().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if j == (i + 1) % 8 { 1.0 } else { 0.0 };
                assert!((d[(i, j)] - c(expect)).norm() < 1e-14);
            }
        }
        let full = s.pow(8);
        assert!(
            full.max_abs_diff(&CirculantMatrix::identity(&circle, 1))
                .unwrap()
                < 1e-14
        );
        let inv = s.pow(-1).dense().unwrap();
        assert!(linalg::max_abs(&(inv - d.transpose())) < 1e-14);
    }

    #[test]
    fn period_four_layout() {
        // coefficients (c0, c1, c2, c1) in index order 0, 1, 2, 3 = -1 (mod 4)
        let circle = grid(2).unwrap();
        let (c0, c1, c2) = (3.0, 1.0, 0.5);
        let mut coeffs = vec![CMat::zeros(1, 1); 4];
        coeffs[circle.slot(0)][(0, 0)] = c(c0);
        coeffs[circle.slot(1)][(0, 0)] = c(c1);
        coeffs[circle.slot(-1)][(0, 0)] = c(c1);
        coeffs[circle.slot(2)][(0, 0)] = c(c2);
        let m = CirculantMatrix::from_coefficients(&circle, &coeffs).unwrap();
        let d = m.dense().unwrap();
        let expect = [
            [c0, c1, c2, c1],
            [c1, c0, c1, c2],
            [c2, c1, c0, c1],
            [c1, c2, c1, c0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((d[(i, j)] - c(expect[i][j])).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn scalar_inverse_value() {
        let circle = grid(4).unwrap();
        let p = PseudoPolynomial::real(&[2.5, 1.0]).unwrap();
        let m = CirculantMatrix::from_symbol(&circle, &p).unwrap();
        let inv = m.inverse().unwrap();
        let at_one = inv.values()[circle.slot(0)][(0, 0)];
        assert!((at_one - c(1.0 / 4.5)).norm() < 1e-15);
        let r = inv.is_banded(1, BANDED_TOL).unwrap();
        assert!(!r.banded);
        assert!(r.residual > 1e-3);
    }

    #[test]
    fn singular_value_named() {
        let circle = grid(2).unwrap();
        let p = PseudoPolynomial::real(&[1.0, 0.5]).unwrap();
        // zero at zeta = -1, slot of k = 2
        let m = CirculantMatrix::from_symbol(&circle, &p).unwrap();
        assert_eq!(m.inverse().unwrap_err(), Error::Singular { index: 2 });
        assert!(matches!(
            m.log().unwrap_err(),
            Error::NotPositiveDefinite { index: 2, .. }
        ));
    }

    #[test]
    fn trace_form_examples() {
        let circle = grid(5).unwrap();
        let id = CirculantMatrix::identity(&circle, 1);
        assert!((id.trace_form(&id).unwrap() - 10.0).abs() < 1e-14);
        let a = PseudoPolynomial::new(vec![c(1.0), Complex64::new(0.2, 0.1)]).unwrap();
        let b = PseudoPolynomial::new(vec![c(0.5), Complex64::new(-0.3, 0.4), c(0.1)]).unwrap();
        let ca = CirculantMatrix::from_symbol(&circle, &a).unwrap();
        let cb = CirculantMatrix::from_symbol(&circle, &b).unwrap();
        let expect = 10.0 * a.inner(&b);
        assert!((ca.trace_form(&cb).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn dense_cap_enforced() {
        let circle = grid(3000).unwrap();
        let id = CirculantMatrix::identity(&circle, 1);
        assert!(matches!(
            id.dense(),
            Err(Error::DenseCapExceeded { size: 6000, .. })
        ));
    }
}
