//! From a solved pair `(P, Q)` to stochastic models: covariance extension,
//! bilateral and unilateral ARMA forms, whitening factors, covariance
//! selection, and spectral-domain simulation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circulant::CirculantMatrix;
use crate::cones::FullPeriodicSequence;
use crate::error::{Error, Result};
use crate::harmonics::{
    eval_symbol, inverse_dft, moments, symbol_coefficients, DiscreteCircle, DiscreteSpectrum,
    PseudoPolynomial,
};
use crate::linalg::CMat;
use crate::roots::{poly_from_roots, polynomial_roots};

/// Acceptance gate for `|a a^* - M|` on the grid, relative to `max(1, max M)`.
pub const FACTOR_RESIDUAL_GATE: f64 = 1e-8;
/// Roots closer than this to the unit circle count as lying on it.
pub const ON_CIRCLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// `sum_{|k|<=n} q_k y(t-k) = sum_{|k|<=n} p_k e(t-k)`, `e` the conjugate process.
    Bilateral,
    /// `sum_k a_k y(t-k) = sum_k b_k w(t-k)`, `w` white.
    UnilateralForward,
    /// `sum_k a_k y(t+k) = sum_k b_k w(t+k)`, `w` white.
    UnilateralBackward,
}

/// ARMA model coefficients.
///
/// Bilateral models store `a = (q_{-n}, ..., q_n)` and `b = (p_{-n}, ..., p_n)`.
/// Unilateral models store `a_0..a_n` (with `a_0 = 1`) and `b_0..b_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaModel {
    pub kind: ModelKind,
    pub order: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl ArmaModel {
    fn one_sided(&self, coeffs: &[Complex64], circle: &DiscreteCircle) -> Vec<Complex64> {
        let sign = match self.kind {
            ModelKind::UnilateralBackward => 1,
            _ => -1,
        };
        (0..circle.len())
            .map(|s| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * circle.power(s, sign * k as i64))
                    .sum()
            })
            .collect()
    }

    fn bilateral_poly(coeffs: &[Complex64]) -> Result<PseudoPolynomial> {
        let n = coeffs.len() / 2;
        PseudoPolynomial::new(coeffs[n..].to_vec())
    }

    /// Denominator symbol `Q` (bilateral) or `|a|^2` (unilateral) on the grid.
    pub fn denominator_values(&self, circle: &DiscreteCircle) -> Result<Vec<f64>> {
        match self.kind {
            ModelKind::Bilateral => eval_symbol(&Self::bilateral_poly(&self.a)?, circle),
            _ => Ok(self
                .one_sided(&self.a, circle)
                .iter()
                .map(|z| z.norm_sqr())
                .collect()),
        }
    }

    pub fn numerator_values(&self, circle: &DiscreteCircle) -> Result<Vec<f64>> {
        match self.kind {
            ModelKind::Bilateral => eval_symbol(&Self::bilateral_poly(&self.b)?, circle),
            _ => Ok(self
                .one_sided(&self.b, circle)
                .iter()
                .map(|z| z.norm_sqr())
                .collect()),
        }
    }

    /// Spectral density of the model on the grid.
    pub fn spectrum(&self, circle: &DiscreteCircle) -> Result<DiscreteSpectrum> {
        let num = self.numerator_values(circle)?;
        let den = self.denominator_values(circle)?;
        if let Some(s) = den.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositive {
                index: circle.index(s),
                value: den[s],
            });
        }
        DiscreteSpectrum::new(
            circle.clone(),
            num.iter().zip(&den).map(|(p, q)| p / q).collect(),
        )
    }

    /// Transfer function `b/a` on the grid (unilateral models only).
    pub fn transfer(&self, circle: &DiscreteCircle) -> Result<Vec<Complex64>> {
        if self.kind == ModelKind::Bilateral {
            return Err(Error::InvalidParameter(
                "bilateral models have no causal transfer function".into(),
            ));
        }
        let a = self.one_sided(&self.a, circle);
        let b = self.one_sided(&self.b, circle);
        Ok(b.iter().zip(&a).map(|(b, a)| b / a).collect())
    }

    /// Roots of `z^n a(z)` for a forward model.
    pub fn denominator_roots(&self) -> Vec<Complex64> {
        let mut rev: Vec<Complex64> = self.a.clone();
        rev.reverse();
        polynomial_roots(&rev)
    }
}

/// Full periodic covariance sequence of `P/Q`.
pub fn extend_covariances(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<FullPeriodicSequence> {
    let phi = DiscreteSpectrum::rational(circle, p, q)?;
    let lags = moments(circle, phi.values(), circle.half_period())?;
    FullPeriodicSequence::scalar_half(circle.half_period(), &lags)
}

/// Bilateral ARMA form of `Sigma = Q^{-1} P`.
pub fn bilateral_arma(p: &PseudoPolynomial, q: &PseudoPolynomial) -> ArmaModel {
    let order = p.degree().max(q.degree());
    let two_sided = |x: &PseudoPolynomial| -> Vec<Complex64> {
        (-(order as i64)..=order as i64)
            .map(|k| x.coeff(k))
            .collect()
    };
    ArmaModel {
        kind: ModelKind::Bilateral,
        order,
        a: two_sided(q),
        b: two_sided(p),
    }
}

fn min_on_circle(m: &PseudoPolynomial, extra_angles: impl Iterator<Item = f64>) -> f64 {
    let samples = (64 * (m.degree() + 1)).max(2048);
    let step = 2.0 * std::f64::consts::PI / samples as f64;
    (0..samples)
        .map(|i| i as f64 * step)
        .chain(extra_angles)
        .map(|t| m.eval_angle(t))
        .fold(f64::INFINITY, f64::min)
}

/// Outer factor `a_0..a_n` of `M` with `a(zeta) a(zeta)^* = M(zeta)`, where
/// `a(z) = sum_k a_k z^{-k}` has all roots inside the unit disc and `a_0 > 0`.
pub fn factor_banded(
    m: &PseudoPolynomial,
    n: usize,
    circle: &DiscreteCircle,
) -> Result<Vec<Complex64>> {
    if n >= circle.half_period() {
        return Err(Error::DegreeTooLarge {
            degree: n,
            half_period: circle.half_period(),
        });
    }
    let mut d = m.degree();
    while d > 0 && m.coeff(d as i64).norm() == 0.0 {
        d -= 1;
    }
    if d > n {
        return Err(Error::DimensionMismatch(format!(
            "symbol degree {d} exceeds the requested order {n}"
        )));
    }
    let values = eval_symbol(m, circle)?;
    if let Some(s) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive {
            index: circle.index(s),
            value: values[s],
        });
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n + 1];
    if d == 0 {
        a[0] = Complex64::new(m.coeff(0).re.sqrt(), 0.0);
        return Ok(a);
    }

    // z^d M(z) has coefficient m_{d-j} at z^j.
    let poly: Vec<Complex64> = (0..=2 * d).map(|j| m.coeff(d as i64 - j as i64)).collect();
    let mut roots = polynomial_roots(&poly);
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));

    // A sign change on the circle shows up as a negative sample; a touching
    // zero as a (near-)double root on the circle with a vanishing minimum.
    let lowest = min_on_circle(m, roots.iter().map(|r| r.arg()));
    let scale = values.iter().cloned().fold(1.0, f64::max);
    if lowest < -1e-12 * scale {
        return Err(Error::DiscreteOnly);
    }
    if lowest <= 1e-12 * scale || roots.iter().any(|r| (r.norm() - 1.0).abs() < ON_CIRCLE_TOL) {
        return Err(Error::FactorizationOnCircle);
    }

    let inside = &roots[..d];
    // prod (1 - r_i w) in powers of w = z^{-1}
    let monic = poly_from_roots(inside);
    let shape: Vec<Complex64> = (0..=d).map(|k| monic[d - k]).collect();
    let shape_values: Vec<f64> = (0..circle.len())
        .map(|s| {
            shape
                .iter()
                .enumerate()
                .map(|(k, &c)| c * circle.power(s, -(k as i64)))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    let a0_sq = values
        .iter()
        .zip(&shape_values)
        .map(|(v, s)| v / s)
        .sum::<f64>()
        / values.len() as f64;
    let a0 = a0_sq.sqrt();
    for (k, c) in shape.iter().enumerate() {
        a[k] = c * a0;
        if m.is_real() {
            a[k].im = 0.0;
        }
    }

    let residual = factor_residual(&a, &values, circle);
    if residual > FACTOR_RESIDUAL_GATE * scale {
        return Err(Error::FactorizationResidual { residual });
    }
    Ok(a)
}

/// `max_j |a(zeta_j) a(zeta_j)^* - M(zeta_j)|`.
pub fn factor_residual(a: &[Complex64], m_values: &[f64], circle: &DiscreteCircle) -> f64 {
    (0..circle.len())
        .map(|s| {
            let v: Complex64 = a
                .iter()
                .enumerate()
                .map(|(k, &c)| c * circle.power(s, -(k as i64)))
                .sum();
            (v.norm_sqr() - m_values[s]).abs()
        })
        .fold(0.0, f64::max)
}

/// Forward and backward unilateral models with `a_0 = 1`.
pub fn unilateral_arma(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<(ArmaModel, ArmaModel)> {
    let order = p.degree().max(q.degree());
    let a_raw = factor_banded(q, order, circle)?;
    let b_raw = factor_banded(p, order, circle)?;
    let a0 = a_raw[0];
    let a: Vec<Complex64> = a_raw.iter().map(|c| c / a0).collect();
    let b: Vec<Complex64> = b_raw.iter().map(|c| c / a0).collect();
    let forward = ArmaModel {
        kind: ModelKind::UnilateralForward,
        order,
        a: a.clone(),
        b: b.clone(),
    };
    let backward = ArmaModel {
        kind: ModelKind::UnilateralBackward,
        order,
        a: a.iter().map(|c| c.conj()).collect(),
        b: b.iter().map(|c| c.conj()).collect(),
    };
    Ok((forward, backward))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhiteningForm {
    /// Lower-triangular (outer) circulant `B A^{-1}` from banded factors.
    Outer,
    /// Pointwise square root of the spectrum; exists for any positive spectrum.
    Pointwise,
}

/// `W` with `W(zeta_j) W(zeta_j)^* = Phi(zeta_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteningFactor {
    pub form: WhiteningForm,
    pub circle: DiscreteCircle,
    /// `W(zeta_j)` in slot order.
    pub values: Vec<Complex64>,
    /// Banded pair `(a, b)` for the outer form.
    pub banded: Option<(Vec<Complex64>, Vec<Complex64>)>,
}

impl WhiteningFactor {
    /// Coefficients `W_0..W_{2N-1}` of `W(z) = sum_k W_k z^{-k}` (indices mod 2N).
    pub fn coefficients(&self) -> Vec<Complex64> {
        let g = inverse_dft(&self.circle, &self.values).expect("length matches the grid");
        let len = self.circle.len() as i64;
        let n = self.circle.half_period() as i64;
        (0..len)
            .map(|k| g[self.circle.slot(if k > n { k - len } else { k })])
            .collect()
    }

    pub fn residual(&self, phi: &DiscreteSpectrum) -> f64 {
        self.values
            .iter()
            .zip(phi.values())
            .map(|(w, f)| (w.norm_sqr() - f).abs())
            .fold(0.0, f64::max)
    }

    /// `W` as a circulant matrix, so that `Sigma = W W^*`.
    pub fn to_circulant(&self) -> Result<CirculantMatrix> {
        CirculantMatrix::from_values(
            &self.circle,
            self.values
                .iter()
                .map(|&w| CMat::from_element(1, 1, w))
                .collect(),
        )
    }
}

/// Outer whitening factor of `P/Q` through banded factorization.
pub fn whitening_rational(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<WhiteningFactor> {
    let (forward, _) = unilateral_arma(circle, p, q)?;
    Ok(WhiteningFactor {
        form: WhiteningForm::Outer,
        circle: circle.clone(),
        values: forward.transfer(circle)?,
        banded: Some((forward.a, forward.b)),
    })
}

/// Whitening factor of a spectrum. A spectrum whose symbol or reciprocal is
/// a pseudo-polynomial of degree below N/2 gets the outer form; anything
/// else gets the pointwise square root.
pub fn whitening(phi: &DiscreteSpectrum) -> Result<WhiteningFactor> {
    phi.check_positive()?;
    let circle = phi.circle();
    let pointwise = || WhiteningFactor {
        form: WhiteningForm::Pointwise,
        circle: circle.clone(),
        values: phi
            .values()
            .iter()
            .map(|v| Complex64::new(v.sqrt(), 0.0))
            .collect(),
        banded: None,
    };
    let limit = circle.half_period().saturating_sub(1) / 2;
    let recip: Vec<f64> = phi.values().iter().map(|v| 1.0 / v).collect();
    let one = PseudoPolynomial::one();
    for (values, is_ma) in [(phi.values(), true), (recip.as_slice(), false)] {
        if let Some(poly) = low_degree_symbol(circle, values, limit) {
            let (p, q) = if is_ma { (&poly, &one) } else { (&one, &poly) };
            if let Ok(w) = whitening_rational(circle, p, q) {
                if w.residual(phi)
                    <= FACTOR_RESIDUAL_GATE * phi.values().iter().cloned().fold(1.0, f64::max)
                {
                    return Ok(w);
                }
            }
        }
    }
    Ok(pointwise())
}

/// The pseudo-polynomial of degree at most `limit` with these grid values, if any.
fn low_degree_symbol(
    circle: &DiscreteCircle,
    values: &[f64],
    limit: usize,
) -> Option<PseudoPolynomial> {
    let full = moments(circle, values, circle.half_period()).ok()?;
    let scale = full[0].norm().max(f64::MIN_POSITIVE);
    let tail = full[limit + 1..]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if tail > 1e-12 * scale {
        return None;
    }
    let mut d = limit;
    while d > 0 && full[d].norm() <= 1e-14 * scale {
        d -= 1;
    }
    symbol_coefficients(circle, values, d).ok()
}

/// Sample paths `y(t)`, `t = -N+1..N`, one vector per realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub half_period: usize,
    pub paths: Vec<Vec<Complex64>>,
}

/// Draws `R` periods of a stationary process with spectrum `Phi`.
///
/// Each `y_hat(zeta_k)` is an independent complex Gaussian with variance
/// `2N Phi(zeta_k)` and `y(t) = (1/2N) sum_k zeta_k^t y_hat(zeta_k)`.
/// With `real_output` the draws are conjugate-symmetric; that requires
/// `Phi(zeta_k) = Phi(zeta_{-k})`.
pub fn simulate(
    phi: &DiscreteSpectrum,
    realizations: usize,
    seed: u64,
    real_output: bool,
) -> Result<Simulation> {
    phi.check_positive()?;
    let circle = phi.circle();
    let n = circle.half_period() as i64;
    let len = circle.len();
    let values = phi.values();
    if real_output {
        let scale = values.iter().cloned().fold(0.0, f64::max);
        for k in 1..n {
            let d = (values[circle.slot(k)] - values[circle.slot(-k)]).abs();
            if d > 1e-12 * scale {
                return Err(Error::InvalidParameter(format!(
                    "spectrum is not symmetric at k = {k}; real output needs Phi(zeta_k) = Phi(zeta_-k)"
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale = (len as f64).sqrt();
    let mut paths = Vec::with_capacity(realizations);
    for _ in 0..realizations {
        let mut hat = vec![Complex64::new(0.0, 0.0); len];
        if real_output {
            for k in 0..=n {
                let s = circle.slot(k);
                let sd = scale * values[s].sqrt();
                if k == 0 || k == n {
                    hat[s] = Complex64::new(sd * draw(), 0.0);
                } else {
                    let z = Complex64::new(draw(), draw()) * (sd / 2f64.sqrt());
                    hat[s] = z;
                    hat[circle.slot(-k)] = z.conj();
                }
            }
        } else {
            for (s, h) in hat.iter_mut().enumerate() {
                let sd = scale * values[s].sqrt() / 2f64.sqrt();
                *h = Complex64::new(draw(), draw()) * sd;
            }
        }
        let path: Vec<Complex64> = (0..len)
            .map(|ts| {
                let t = circle.index(ts);
                let sum: Complex64 = hat
                    .iter()
                    .enumerate()
                    .map(|(s, &h)| h * circle.power(s, t))
                    .sum();
                let v = sum / len as f64;
                if real_output {
                    Complex64::new(v.re, 0.0)
                } else {
                    v
                }
            })
            .collect();
        paths.push(path);
    }
    Ok(Simulation {
        half_period: circle.half_period(),
        paths,
    })
}

/// Realization-averaged circular sample lags with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLags {
    pub mean: Vec<Complex64>,
    /// Standard errors of the real and imaginary parts.
    pub stderr_re: Vec<f64>,
    pub stderr_im: Vec<f64>,
}

impl SampleLags {
    /// True when every lag lies within `sigmas` standard errors of `truth`.
    pub fn within(&self, truth: &[Complex64], sigmas: f64) -> bool {
        self.mean.iter().zip(truth).enumerate().all(|(k, (m, t))| {
            let slack = 1e-12 * t.norm().max(1.0);
            (m.re - t.re).abs() <= sigmas * self.stderr_re[k] + slack
                && (m.im - t.im).abs() <= sigmas * self.stderr_im[k] + slack
        })
    }
}

/// `c_hat_k = (1/2N) sum_t y(t+k) y(t)^*` per realization, for `k = 0..n`.
pub fn sample_lags(sim: &Simulation, n: usize) -> SampleLags {
    let len = 2 * sim.half_period;
    let r = sim.paths.len() as f64;
    let per: Vec<Vec<Complex64>> = sim
        .paths
        .iter()
        .map(|y| {
            (0..=n)
                .map(|k| {
                    (0..len)
                        .map(|t| y[(t + k) % len] * y[t].conj())
                        .sum::<Complex64>()
                        / len as f64
                })
                .collect()
        })
        .collect();
    let mut mean = vec![Complex64::new(0.0, 0.0); n + 1];
    for lags in &per {
        for (m, l) in mean.iter_mut().zip(lags) {
            *m += l / r;
        }
    }
    let spread = |part: fn(&Complex64) -> f64| -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let mu = part(&mean[k]);
                let var = per.iter().map(|l| (part(&l[k]) - mu).powi(2)).sum::<f64>()
                    / (r - 1.0).max(1.0);
                (var / r).sqrt()
            })
            .collect()
    };
    SampleLags {
        stderr_re: spread(|z| z.re),
        stderr_im: spread(|z| z.im),
        mean,
    }
}

fn expand(indices: &[usize], m: usize) -> Vec<usize> {
    indices
        .iter()
        .flat_map(|&i| (0..m).map(move |r| i * m + r))
        .collect()
}

fn select(x: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| x[(rows[i], cols[j])])
}

/// `E{y~_J y~_K^*} = Sigma~_J G_JK Sigma~_K` with `G = Sigma^{-1}` and
/// `Sigma~_J = (G_JJ)^{-1}`, the covariance of `y_J` given all other times.
/// Vanishes exactly when the block `G_JK` does.
pub fn conditional_orthogonality(
    sigma: &CirculantMatrix,
    j: &[usize],
    k: &[usize],
) -> Result<CMat> {
    let len = sigma.circle().len();
    for &t in j.iter().chain(k) {
        if t >= len {
            return Err(Error::IndexOutOfRange {
                index: t as i64,
                limit: len - 1,
            });
        }
    }
    if j.is_empty() || k.is_empty() {
        return Err(Error::InvalidParameter(
            "index sets must be non-empty".into(),
        ));
    }
    if j.iter().any(|t| k.contains(t)) {
        return Err(Error::InvalidParameter(
            "index sets must be disjoint".into(),
        ));
    }
    let dense = sigma.dense()?;
    let g = dense
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { index: 0 })?;
    let m = sigma.block();
    let (jj, kk) = (expand(j, m), expand(k, m));
    let sj = select(&g, &jj, &jj)
        .try_inverse()
        .ok_or(Error::Singular { index: j[0] as i64 })?;
    let sk = select(&g, &kk, &kk)
        .try_inverse()
        .ok_or(Error::Singular { index: k[0] as i64 })?;
    Ok(sj * select(&g, &jj, &kk) * sk)
}

/// Largest modulus of `G_JK`, the block tested by [`conditional_orthogonality`].
pub fn concentration_block(
    sigma: &CirculantMatrix,
    j: &[usize],
    k: &[usize],
) -> Result<DMatrix<Complex64>> {
    let g = sigma.inverse()?.dense()?;
    let m = sigma.block();
    Ok(select(&g, &expand(j, m), &expand(k, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{grid, moments_of};
    use crate::linalg;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn extension_examples() {
        let circle = grid(5).unwrap();
        let p = PseudoPolynomial::real(&[1.5, 0.4]).unwrap();
        let ext = extend_covariances(&circle, &p, &p).unwrap();
        let lags = ext.scalar_lags();
        assert!((lags[0] - c(1.0)).norm() < 1e-15);
        assert!(lags[1..].iter().all(|z| z.norm() < 1e-15));
        let ext = extend_covariances(
            &circle,
            &PseudoPolynomial::one(),
            &PseudoPolynomial::constant(0.25),
        )
        .unwrap();
        assert!((ext.scalar_lags()[0] - c(4.0)).norm() < 1e-14);
    }

    #[test]
    fn extension_matches_direct_summation() {
        let circle = grid(8).unwrap();
        let q = PseudoPolynomial::real(&[1.25, 0.5, 0.05]).unwrap();
        let one = PseudoPolynomial::one();
        let ext = extend_covariances(&circle, &one, &q).unwrap();
        for k in 0..16i64 {
            let direct: Complex64 = (0..16)
                .map(|s| {
                    let th = circle.angle(s);
                    let qv = 1.25 + 2.0 * 0.5 * th.cos() + 2.0 * 0.05 * (2.0 * th).cos();
                    Complex64::from_polar(1.0 / qv, k as f64 * th)
                })
                .sum::<Complex64>()
                / 16.0;
            assert!((ext.lag(k)[(0, 0)] - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn factor_examples() {
        let circle = grid(8).unwrap();
        let a = factor_banded(&PseudoPolynomial::one(), 0, &circle).unwrap();
        assert_eq!(a, vec![c(1.0)]);
        let m = PseudoPolynomial::real(&[2.5, 1.0]).unwrap();
        let a = factor_banded(&m, 1, &circle).unwrap();
        assert!((a[0] - c(2f64.sqrt())).norm() < 1e-12);
        assert!((a[1] - c(0.5f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn factor_complex_symbol() {
        let circle = grid(16).unwrap();
        let m = PseudoPolynomial::new(vec![
            c(3.0),
            Complex64::new(0.6, -0.8),
            Complex64::new(0.2, 0.3),
        ])
        .unwrap();
        let a = factor_banded(&m, 2, &circle).unwrap();
        let values = eval_symbol(&m, &circle).unwrap();
        assert!(factor_residual(&a, &values, &circle) < 1e-12);
        assert!(a[0].im == 0.0 && a[0].re > 0.0);
    }

    #[test]
    fn factor_errors() {
        let circle = grid(8).unwrap();
        // 1 + cos(theta) vanishes at the grid point theta = pi
        let on = PseudoPolynomial::real(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            factor_banded(&on, 1, &circle),
            Err(Error::NonPositive { .. })
        ));
        // 2 - 2cos(theta - pi/8) touches zero between the grid points of N = 4
        let circle4 = grid(4).unwrap();
        let t = std::f64::consts::PI / 8.0;
        let touch = PseudoPolynomial::new(vec![c(2.0), -Complex64::from_polar(1.0, t)]).unwrap();
        assert_eq!(
            factor_banded(&touch, 1, &circle4),
            Err(Error::FactorizationOnCircle)
        );
        // 1 + 1.04 cos(theta - phi) dips below zero only inside a gap of the grid
        let phi = t - std::f64::consts::PI;
        let dip = PseudoPolynomial::new(vec![c(1.0), Complex64::from_polar(0.52, phi)]).unwrap();
        assert!(eval_symbol(&dip, &circle4)
            .unwrap()
            .iter()
            .all(|&v| v > 0.0));
        assert_eq!(factor_banded(&dip, 1, &circle4), Err(Error::DiscreteOnly));
    }

    #[test]
    fn unilateral_ar1() {
        let circle = grid(8).unwrap();
        let q = PseudoPolynomial::real(&[2.5, 1.0]).unwrap();
        let (f, b) = unilateral_arma(&circle, &PseudoPolynomial::one(), &q).unwrap();
        assert!((f.a[0] - c(1.0)).norm() < 1e-14);
        assert!((f.a[1] - c(0.5)).norm() < 1e-12);
        assert!((f.b[0] - c(0.5f64.sqrt())).norm() < 1e-12);
        assert!(f.b[1].norm() < 1e-15);
        let sf = f.spectrum(&circle).unwrap();
        let sb = b.spectrum(&circle).unwrap();
        let truth = DiscreteSpectrum::rational(&circle, &PseudoPolynomial::one(), &q).unwrap();
        for ((x, y), z) in sf.values().iter().zip(sb.values()).zip(truth.values()) {
            assert!((x - z).abs() < 1e-12 && (y - z).abs() < 1e-12);
        }
        assert!(f.denominator_roots().iter().all(|r| r.norm() < 1.0));
    }

    #[test]
    fn whitening_examples() {
        let circle = grid(8).unwrap();
        let flat = DiscreteSpectrum::new(circle.clone(), vec![4.0; 16]).unwrap();
        let w = whitening(&flat).unwrap();
        assert!(w.values.iter().all(|z| (z - c(2.0)).norm() < 1e-12));
        let ma = PseudoPolynomial::real(&[1.25, 0.5]).unwrap();
        let phi = DiscreteSpectrum::rational(&circle, &ma, &PseudoPolynomial::one()).unwrap();
        let w = whitening(&phi).unwrap();
        assert_eq!(w.form, WhiteningForm::Outer);
        let coeffs = w.coefficients();
        assert!((coeffs[0] - c(1.0)).norm() < 1e-12);
        assert!((coeffs[1] - c(0.5)).norm() < 1e-12);
        assert!(coeffs[2..].iter().all(|z| z.norm() < 1e-12));
        let rough: Vec<f64> = (0..16).map(|s| 1.0 + 0.5 * ((s * s) % 7) as f64).collect();
        let phi = DiscreteSpectrum::new(circle, rough).unwrap();
        let w = whitening(&phi).unwrap();
        assert_eq!(w.form, WhiteningForm::Pointwise);
        assert!(w.residual(&phi) <= 1e-10);
    }

    #[test]
    fn bilateral_model_reproduces_sigma() {
        let circle = grid(6).unwrap();
        let p = PseudoPolynomial::real(&[1.0, 0.2]).unwrap();
        let q = PseudoPolynomial::new(vec![c(2.0), Complex64::new(0.4, 0.3)]).unwrap();
        let model = bilateral_arma(&p, &q);
        assert_eq!(model.a.len(), 3);
        let sigma =
            CirculantMatrix::from_scalar_values(&circle, model.spectrum(&circle).unwrap().values())
                .unwrap();
        let lhs = CirculantMatrix::from_symbol(&circle, &q)
            .unwrap()
            .dense()
            .unwrap()
            * sigma.dense().unwrap();
        let rhs = CirculantMatrix::from_symbol(&circle, &p)
            .unwrap()
            .dense()
            .unwrap();
        assert!(linalg::max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn white_noise_sample_lags() {
        let circle = grid(4).unwrap();
        let phi = DiscreteSpectrum::new(circle, vec![1.0; 8]).unwrap();
        let sim = simulate(&phi, 10_000, 7, true).unwrap();
        let lags = sample_lags(&sim, 1);
        assert!((lags.mean[0].re - 1.0).abs() <= 0.05);
        assert!(lags.mean[1].norm() <= 0.05);
        assert!(sim.paths.iter().flatten().all(|z| z.im == 0.0));
        assert_eq!(
            simulate(&phi, 3, 7, true).unwrap(),
            simulate(&phi, 3, 7, true).unwrap()
        );
        assert_ne!(
            simulate(&phi, 3, 7, true).unwrap(),
            simulate(&phi, 3, 8, true).unwrap()
        );
    }

    #[test]
    fn simulated_lags_track_the_extension() {
        let circle = grid(8).unwrap();
        let q = PseudoPolynomial::real(&[1.25, 0.5, 0.05]).unwrap();
        let one = PseudoPolynomial::one();
        let phi = DiscreteSpectrum::rational(&circle, &one, &q).unwrap();
        let truth = moments_of(&phi, 2).unwrap();
        let sim = simulate(&phi, 4000, 11, false).unwrap();
        assert!(sample_lags(&sim, 2).within(&truth, 4.0));
    }

    #[test]
    fn asymmetric_spectrum_needs_complex_output() {
        let circle = grid(4).unwrap();
        let p = PseudoPolynomial::new(vec![c(2.0), Complex64::new(0.0, 0.5)]).unwrap();
        let phi = DiscreteSpectrum::rational(&circle, &p, &PseudoPolynomial::one()).unwrap();
        assert!(simulate(&phi, 1, 0, true).is_err());
        assert!(simulate(&phi, 1, 0, false).is_ok());
    }

    #[test]
    fn conditional_orthogonality_examples() {
        let circle = grid(3).unwrap();
        let diag = CirculantMatrix::from_scalar_values(&circle, &[2.0; 6]).unwrap();
        let out = conditional_orthogonality(&diag, &[1], &[3]).unwrap();
        assert!(linalg::max_abs(&out) < 1e-15);
        assert!(conditional_orthogonality(&diag, &[1], &[1]).is_err());
        assert!(conditional_orthogonality(&diag, &[1], &[6]).is_err());

        // Sigma = Q^{-1}, Q banded of order 1: reciprocal of order 1.
        let q = PseudoPolynomial::real(&[2.0, 0.6]).unwrap();
        let sigma = CirculantMatrix::from_symbol(&circle, &q)
            .unwrap()
            .inverse()
            .unwrap();
        let far = conditional_orthogonality(&sigma, &[0], &[2, 3, 4]).unwrap();
        assert!(linalg::max_abs(&far) < 1e-8);
        let near = conditional_orthogonality(&sigma, &[0], &[1]).unwrap();
        assert!(linalg::max_abs(&near) > 1e-3);
    }
}
