//! The discrete unit circle of 2N-th roots of unity, Hermitian
//! pseudo-polynomials, and the uniform atomic measure that turns integrals
//! into grid averages.
//!
//! Grid slots are always ordered `k = -N+1, ..., N`; slot `s` holds
//! `zeta_k` with `k = s - N + 1`. Every serialized spectrum uses this order.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Imaginary residue below this is discarded when a real symbol is expected.
pub const REAL_RESIDUE_TOL: f64 = 1e-12;

/// The 2N points `zeta_k = exp(i k pi / N)`, `k = -N+1..=N`.
#[derive(Debug, Clone)]
pub struct DiscreteCircle {
    half_period: usize,
    // roots[m] = exp(i pi m / N), m = 0..2N. Powers of grid points are read
    // from this table so that zeta^(2N) = 1 holds exactly.
    roots: Arc<[Complex64]>,
}

impl PartialEq for DiscreteCircle {
    fn eq(&self, other: &Self) -> bool {
        self.half_period == other.half_period
    }
}

impl Eq for DiscreteCircle {}

impl DiscreteCircle {
    pub fn new(half_period: usize) -> Result<Self> {
        if half_period == 0 {
            return Err(Error::ZeroHalfPeriod);
        }
        let len = 2 * half_period;
        let roots: Vec<Complex64> = (0..len).map(|m| unit_root(m as i64, half_period)).collect();
        Ok(Self {
            half_period,
            roots: roots.into(),
        })
    }

    /// N.
    pub fn half_period(&self) -> usize {
        self.half_period
    }

    /// Number of grid points, 2N.
    pub fn len(&self) -> usize {
        2 * self.half_period
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid index `k` held in slot `s`.
    pub fn index(&self, slot: usize) -> i64 {
        slot as i64 - self.half_period as i64 + 1
    }

    /// Slot holding grid index `k` (taken modulo 2N).
    pub fn slot(&self, k: i64) -> usize {
        let n = self.half_period as i64;
        (k + n - 1).rem_euclid(2 * n) as usize
    }

    /// Angle `theta_k = k pi / N` of the point in slot `s`.
    pub fn angle(&self, slot: usize) -> f64 {
        self.index(slot) as f64 * PI / self.half_period as f64
    }

    /// `zeta_k` for an arbitrary integer `k`.
    pub fn zeta(&self, k: i64) -> Complex64 {
        self.roots[k.rem_euclid(self.len() as i64) as usize]
    }

    /// `zeta_j^power` where `j` is the grid index of `slot`.
    pub fn power(&self, slot: usize, power: i64) -> Complex64 {
        self.zeta(self.index(slot) * power)
    }

    /// The grid points in slot order.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|s| self.zeta(self.index(s))).collect()
    }

    /// Indices `-N+1..=N` in slot order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).map(|s| self.index(s))
    }
}

fn unit_root(m: i64, half_period: usize) -> Complex64 {
    let len = 2 * half_period as i64;
    let m = m.rem_euclid(len);
    // Exact values at the quarter points keep the trivial examples exact.
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * m == len {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * m == len {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * m == 3 * len {
        return Complex64::new(0.0, -1.0);
    }
    // The lower half is the mirror image, so zeta_{-k} = conj(zeta_k) exactly.
    if 2 * m > len {
        return unit_root(len - m, half_period).conj();
    }
    Complex64::from_polar(1.0, PI * m as f64 / half_period as f64)
}

/// Builds the discrete circle for half-period `n`.
pub fn grid(half_period: usize) -> Result<DiscreteCircle> {
    DiscreteCircle::new(half_period)
}

/// A Hermitian Laurent polynomial `P(z) = sum_{k=-n}^{n} p_k z^{-k}` with
/// `p_{-k} = conj(p_k)`, stored as `p_0, ..., p_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoPolynomial {
    coeffs: Vec<Complex64>,
    real_only: bool,
}

impl PseudoPolynomial {
    /// Builds from `p_0..p_n`. The imaginary part of `p_0` must vanish.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "pseudo-polynomial needs at least p_0".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let mut coeffs = coeffs;
        let scale = coeffs[0].re.abs().max(1.0);
        if coeffs[0].im.abs() > REAL_RESIDUE_TOL * scale {
            return Err(Error::ImaginaryResidue {
                residue: coeffs[0].im.abs(),
            });
        }
        coeffs[0].im = 0.0;
        let real_only = coeffs.iter().all(|c| c.im == 0.0);
        Ok(Self { coeffs, real_only })
    }

    /// Builds a pseudo-polynomial with real coefficients.
    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(value: f64) -> Self {
        Self {
            coeffs: vec![Complex64::new(value, 0.0)],
            real_only: true,
        }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.real_only
    }

    /// `p_0..p_n`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `p_k` for any integer `k`, zero outside `|k| <= n`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        if idx >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if k < 0 {
            self.coeffs[idx].conj()
        } else {
            self.coeffs[idx]
        }
    }

    /// Copy padded with zeros (or truncated) to degree `n`.
    pub fn with_degree(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        Self {
            coeffs,
            real_only: self.real_only,
        }
    }

    /// Value at a point `z` of the unit circle; real by Hermitian symmetry.
    pub fn eval_unit(&self, z: Complex64) -> f64 {
        let zinv = z.conj();
        let mut acc = 0.0;
        let mut pow = zinv;
        for c in &self.coeffs[1..] {
            acc += (c * pow).re;
            pow *= zinv;
        }
        self.coeffs[0].re + 2.0 * acc
    }

    /// Value at angle `theta`.
    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.eval_unit(Complex64::from_polar(1.0, theta))
    }

    /// Hermitian inner product `sum_{k=-n}^{n} p_k conj(r_k)`, which is real.
    pub fn inner(&self, other: &PseudoPolynomial) -> f64 {
        let n = self.degree().max(other.degree()) as i64;
        let mut acc = (self.coeff(0) * other.coeff(0).conj()).re;
        for k in 1..=n {
            acc += 2.0 * (self.coeff(k) * other.coeff(k).conj()).re;
        }
        acc
    }

    /// Coefficients as the real vector `(p_0, Re p_1, Im p_1, ..., Re p_n, Im p_n)`.
    pub fn to_real_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.degree() + 1);
        out.push(self.coeffs[0].re);
        for c in &self.coeffs[1..] {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }

    /// Inverse of [`to_real_params`](Self::to_real_params).
    pub fn from_real_params(params: &[f64]) -> Result<Self> {
        if params.len() % 2 != 1 {
            return Err(Error::DimensionMismatch(format!(
                "real parametrization needs odd length, got {}",
                params.len()
            )));
        }
        let mut coeffs = vec![Complex64::new(params[0], 0.0)];
        coeffs.extend(
            params[1..]
                .chunks(2)
                .map(|pair| Complex64::new(pair[0], pair[1])),
        );
        Self::new(coeffs)
    }

    /// Largest coefficient modulus difference, padding the shorter one with zeros.
    pub fn max_abs_diff(&self, other: &PseudoPolynomial) -> f64 {
        let n = self.degree().max(other.degree()) as i64;
        (0..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct PseudoPolynomialJson {
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for PseudoPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PseudoPolynomialJson {
            n: self.degree(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PseudoPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PseudoPolynomialJson::deserialize(deserializer)?;
        if raw.coeffs.len() != raw.n + 1 {
            return Err(serde::de::Error::custom(format!(
                "degree {} needs {} coefficients, got {}",
                raw.n,
                raw.n + 1,
                raw.coeffs.len()
            )));
        }
        PseudoPolynomial::new(
            raw.coeffs
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Values `sum_k p_k zeta_j^{-k}` at every grid point, in slot order.
pub fn eval_symbol(p: &PseudoPolynomial, circle: &DiscreteCircle) -> Result<Vec<f64>> {
    if p.degree() >= circle.len() {
        return Err(Error::DegreeTooLarge {
            degree: p.degree(),
            half_period: circle.half_period(),
        });
    }
    let n = p.degree() as i64;
    Ok((0..circle.len())
        .map(|s| {
            let mut acc = p.coeffs[0].re;
            for k in 1..=n {
                acc += 2.0 * (p.coeffs[k as usize] * circle.power(s, -k)).re;
            }
            acc
        })
        .collect())
}

/// `(1/2N) sum_j f(zeta_j) zeta_j^k`, the k-th moment of `f` under the grid measure.
pub fn discrete_moment(circle: &DiscreteCircle, f: &[f64], k: i64) -> Result<Complex64> {
    check_len(circle, f.len())?;
    check_index(circle, k)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, &v) in f.iter().enumerate() {
        acc += circle.power(s, k) * v;
    }
    Ok(acc / circle.len() as f64)
}

/// Complex-valued counterpart of [`discrete_moment`].
pub fn discrete_moment_complex(
    circle: &DiscreteCircle,
    f: &[Complex64],
    k: i64,
) -> Result<Complex64> {
    check_len(circle, f.len())?;
    check_index(circle, k)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, &v) in f.iter().enumerate() {
        acc += circle.power(s, k) * v;
    }
    Ok(acc / circle.len() as f64)
}

/// Moments `0..=n` of a real function on the grid.
pub fn moments(circle: &DiscreteCircle, f: &[f64], n: usize) -> Result<Vec<Complex64>> {
    check_len(circle, f.len())?;
    (0..=n as i64)
        .map(|k| discrete_moment(circle, f, k))
        .collect()
}

/// Full coefficient sequence `g_{-N+1}, ..., g_N` (slot order) whose symbol
/// takes the given grid values.
pub fn inverse_dft(circle: &DiscreteCircle, values: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(circle, values.len())?;
    circle
        .indices()
        .map(|k| discrete_moment_complex(circle, values, k))
        .collect()
}

/// Grid values `G(zeta_j) = sum_k g_k zeta_j^{-k}` of a full coefficient
/// sequence given in slot order.
pub fn forward_dft(circle: &DiscreteCircle, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(circle, coeffs.len())?;
    Ok((0..circle.len())
        .map(|s| {
            coeffs
                .iter()
                .enumerate()
                .map(|(slot_k, &g)| g * circle.power(s, -circle.index(slot_k)))
                .sum()
        })
        .collect())
}

/// Recovers a pseudo-polynomial of degree `n` from grid values of a real symbol.
pub fn symbol_coefficients(
    circle: &DiscreteCircle,
    values: &[f64],
    n: usize,
) -> Result<PseudoPolynomial> {
    if n >= circle.half_period() {
        return Err(Error::DegreeTooLarge {
            degree: n,
            half_period: circle.half_period(),
        });
    }
    let mut coeffs = moments(circle, values, n)?;
    let scale = coeffs[0].norm().max(1.0);
    if coeffs[0].im.abs() > REAL_RESIDUE_TOL * scale {
        return Err(Error::ImaginaryResidue {
            residue: coeffs[0].im.abs(),
        });
    }
    coeffs[0].im = 0.0;
    PseudoPolynomial::new(coeffs)
}

fn check_len(circle: &DiscreteCircle, len: usize) -> Result<()> {
    if len != circle.len() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} grid values, got {}",
            circle.len(),
            len
        )));
    }
    Ok(())
}

fn check_index(circle: &DiscreteCircle, k: i64) -> Result<()> {
    if k.unsigned_abs() as usize > circle.half_period() {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: circle.half_period(),
        });
    }
    Ok(())
}

/// A real spectrum sampled on the grid (scalar case).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectrum {
    circle: DiscreteCircle,
    values: Vec<f64>,
}

impl DiscreteSpectrum {
    pub fn new(circle: DiscreteCircle, values: Vec<f64>) -> Result<Self> {
        check_len(&circle, values.len())?;
        Ok(Self { circle, values })
    }

    /// Spectrum `P/Q` evaluated on the grid.
    pub fn rational(
        circle: &DiscreteCircle,
        p: &PseudoPolynomial,
        q: &PseudoPolynomial,
    ) -> Result<Self> {
        let pv = eval_symbol(p, circle)?;
        let qv = eval_symbol(q, circle)?;
        for (s, &v) in qv.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositive {
                    index: circle.index(s),
                    value: v,
                });
            }
        }
        let values = pv.iter().zip(&qv).map(|(a, b)| a / b).collect();
        Ok(Self {
            circle: circle.clone(),
            values,
        })
    }

    pub fn circle(&self) -> &DiscreteCircle {
        &self.circle
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// First grid point with a non-positive value.
    pub fn check_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| !(v > 0.0)) {
            Some(s) => Err(Error::NonPositive {
                index: self.circle.index(s),
                value: self.values[s],
            }),
            None => Ok(()),
        }
    }
}

/// Covariance lags `c_0..c_n` of a spectrum. Works for any real grid
/// function; positivity is checked by callers that need a spectrum.
pub fn moments_of(phi: &DiscreteSpectrum, n: usize) -> Result<Vec<Complex64>> {
    if n >= phi.circle.half_period() {
        return Err(Error::DegreeTooLarge {
            degree: n,
            half_period: phi.circle.half_period(),
        });
    }
    moments(&phi.circle, &phi.values, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn grid_rejects_zero() {
        assert_eq!(grid(0).unwrap_err(), Error::ZeroHalfPeriod);
    }

    #[test]
    fn grid_small_cases() {
        let c1 = grid(1).unwrap();
        assert_eq!(
            c1.points(),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
        );
        let c2 = grid(2).unwrap();
        assert_eq!(
            c2.points(),
            vec![
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0)
            ]
        );
        let c4 = grid(4).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(c4.zeta(1), Complex64::new(h, h), 1e-15));
    }

    #[test]
    fn grid_invariants() {
        let c = grid(7).unwrap();
        let pts = c.points();
        for (i, z) in pts.iter().enumerate() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert!(close(z.powu(14), Complex64::new(1.0, 0.0), 1e-12));
            for w in &pts[i + 1..] {
                assert!((z - w).norm() > 1e-3);
            }
        }
        for k in 1..7 {
            assert_eq!(c.zeta(-k), c.zeta(k).conj());
        }
    }

    #[test]
    fn eval_symbol_examples() {
        let c = grid(2).unwrap();
        let one = eval_symbol(&PseudoPolynomial::one(), &c).unwrap();
        assert!(one.iter().all(|&v| v == 1.0));

        let p = PseudoPolynomial::real(&[0.0, 0.5]).unwrap();
        let v = eval_symbol(&p, &c).unwrap();
        // k = -1, 0, 1, 2 -> cos(k pi / 2)
        let expect = [0.0, 1.0, 0.0, -1.0];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }

        let c8 = grid(8).unwrap();
        let p = PseudoPolynomial::real(&[1.25, 0.5]).unwrap();
        let v = eval_symbol(&p, &c8).unwrap();
        for (s, val) in v.iter().enumerate() {
            let theta = c8.angle(s);
            // direct summation over k = -1, 0, 1
            let direct = 0.5 * Complex64::from_polar(1.0, theta)
                + 1.25
                + 0.5 * Complex64::from_polar(1.0, -theta);
            assert!((val - direct.re).abs() < 1e-14);
            assert!(direct.im.abs() < 1e-14);
        }
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.25).abs() < 1e-14);
    }

    #[test]
    fn eval_symbol_rejects_large_degree() {
        let c = grid(2).unwrap();
        let p = PseudoPolynomial::real(&[1.0, 0.0, 0.0, 0.0, 0.1]).unwrap();
        assert!(matches!(
            eval_symbol(&p, &c),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn moment_examples() {
        let c = grid(4).unwrap();
        let ones = vec![1.0; 8];
        assert!(close(
            discrete_moment(&c, &ones, 0).unwrap(),
            Complex64::new(1.0, 0.0),
            1e-15
        ));
        for k in 1..=4 {
            assert!(discrete_moment(&c, &ones, k).unwrap().norm() < 1e-15);
            assert!(discrete_moment(&c, &ones, -k).unwrap().norm() < 1e-15);
        }
        let f = eval_symbol(&PseudoPolynomial::real(&[2.0, 1.0]).unwrap(), &c).unwrap();
        let m: Vec<_> = (0..3)
            .map(|k| discrete_moment(&c, &f, k).unwrap())
            .collect();
        assert!(close(m[0], Complex64::new(2.0, 0.0), 1e-14));
        assert!(close(m[1], Complex64::new(1.0, 0.0), 1e-14));
        assert!(close(m[2], Complex64::new(0.0, 0.0), 1e-14));
        assert!(matches!(
            discrete_moment(&c, &f, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn moment_matches_direct_sum() {
        let c = grid(5).unwrap();
        let f: Vec<f64> = (0..10)
            .map(|i| 1.0 + 0.37 * (i as f64).sin().abs())
            .collect();
        // independent oracle: trigonometric sum over angles
        let mut re = 0.0;
        let mut im = 0.0;
        for (s, v) in f.iter().enumerate() {
            let theta = (s as f64 - 4.0) * PI / 5.0;
            re += v * (3.0 * theta).cos();
            im += v * (3.0 * theta).sin();
        }
        let m = discrete_moment(&c, &f, 3).unwrap();
        assert!(close(m, Complex64::new(re / 10.0, im / 10.0), 1e-14));
    }

    #[test]
    fn moments_of_constant_and_negative() {
        let c = grid(6).unwrap();
        let phi = DiscreteSpectrum::new(c.clone(), vec![2.5; 12]).unwrap();
        let m = moments_of(&phi, 3).unwrap();
        assert!(close(m[0], Complex64::new(2.5, 0.0), 1e-14));
        assert!(m[1..].iter().all(|z| z.norm() < 1e-14));

        let mut vals = vec![1.0; 12];
        vals[3] = -0.5;
        let phi = DiscreteSpectrum::new(c, vals).unwrap();
        assert!(!phi.is_positive());
        let m = moments_of(&phi, 2).unwrap();
        assert!((m[0].re - (11.0 - 0.5) / 12.0).abs() < 1e-14);
    }

    #[test]
    fn rational_round_trip_moments() {
        let c = grid(8).unwrap();
        let q = PseudoPolynomial::real(&[1.25, 0.5]).unwrap();
        let phi = DiscreteSpectrum::rational(&c, &PseudoPolynomial::one(), &q).unwrap();
        let m = moments_of(&phi, 2).unwrap();
        for (k, mk) in m.iter().enumerate() {
            let mut acc = 0.0;
            for s in 0..16 {
                let theta = (s as f64 - 7.0) * PI / 8.0;
                acc += (k as f64 * theta).cos() / (1.25 + theta.cos());
            }
            assert!((mk.re - acc / 16.0).abs() < 1e-13);
            assert!(mk.im.abs() < 1e-13);
        }
    }

    #[test]
    fn full_dft_round_trip() {
        let c = grid(4).unwrap();
        let coeffs: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i as f64).cos()))
            .collect();
        let vals = forward_dft(&c, &coeffs).unwrap();
        let back = inverse_dft(&c, &vals).unwrap();
        for (a, b) in coeffs.iter().zip(&back) {
            assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn json_form() {
        let p = PseudoPolynomial::new(vec![Complex64::new(1.5, 0.0), Complex64::new(0.25, -0.5)])
            .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":1,"coeffs":[[1.5,0.0],[0.25,-0.5]]}"#);
        let back: PseudoPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PseudoPolynomial>(r#"{"n":2,"coeffs":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<PseudoPolynomial>(r#"{"n":0,"coeffs":[[1,0.5]]}"#).is_err());
    }

    #[test]
    fn real_params_round_trip() {
        let p = PseudoPolynomial::new(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.3, 0.05),
        ])
        .unwrap();
        let x = p.to_real_params();
        assert_eq!(x, vec![2.0, 0.1, 0.2, -0.3, 0.05]);
        assert_eq!(PseudoPolynomial::from_real_params(&x).unwrap(), p);
    }
}
