//! Joint matching of covariance lags and cepstral (log-spectrum) moments.
//!
//! Minimizes the regularized dual
//! `J_lambda(P, Q) = <c,q> - <gamma,p> + ∫ P log(P/Q) - lambda ∫ log P`
//! over `P, Q` positive on the grid with `p_0 = 1`. At the optimum the lags
//! of `P/Q` equal `c` and its cepstrum equals `gamma + eps` with
//! `eps_k = lambda ∫ zeta^k / P`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cones::{toeplitz_positive, CovarianceData};
use crate::error::{Error, Result};
use crate::harmonics::{eval_symbol, moments, DiscreteCircle, DiscreteSpectrum, PseudoPolynomial};
use crate::json;
use crate::newton::{self, Derivatives, Objective, Outcome, SolverConfig, Status};
use crate::scalar::{lag_vector, TrigBasis};

/// Joint Hessians with condition number above this switch to alternating steps.
/// Regularization path used to warm-start the `lambda = 0` problem.
const CONTINUATION: [f64; 5] = [1e-1, 1e-2, 1e-4, 1e-6, 1e-8];

pub const CONDITION_LIMIT: f64 = 1e12;

/// Cepstral coefficients `gamma_1..gamma_n` (`gamma_0 = 0`, `gamma_{-k} = conj gamma_k`).
#[derive(Debug, Clone, PartialEq)]
pub struct CepstralData {
    coeffs: Vec<Complex64>,
}

impl CepstralData {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "non-finite cepstral coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `gamma_1..gamma_n`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

impl Serialize for CepstralData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|&z| json::complex_pair(z)).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CepstralData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<json::EntryJson>::deserialize(d)?;
        let coeffs = raw
            .iter()
            .map(|e| e.to_block(1).map(|b| b[(0, 0)]))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Self::new(coeffs).map_err(D::Error::custom)
    }
}

/// `gamma_k = (1/2N) sum_j zeta_j^k log Phi(zeta_j)` for `k = 1..n`.
pub fn cepstral_moments(phi: &DiscreteSpectrum, n: usize) -> Result<CepstralData> {
    phi.check_positive()?;
    let logs: Vec<f64> = phi.values().iter().map(|v| v.ln()).collect();
    let mut m = moments(phi.circle(), &logs, n)?;
    m.remove(0);
    CepstralData::new(m)
}

/// `eps_k = lambda (1/2N) sum_j zeta_j^k / P(zeta_j)` for `k = 1..n`.
pub fn epsilon_adjustment(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    lambda: f64,
    n: usize,
) -> Result<Vec<Complex64>> {
    let pv = eval_symbol(p, circle)?;
    if let Some(s) = pv.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive {
            index: circle.index(s),
            value: pv[s],
        });
    }
    let inv: Vec<f64> = pv.iter().map(|v| lambda / v).collect();
    let mut m = moments(circle, &inv, n)?;
    m.remove(0);
    Ok(m)
}

/// Scalar joint objective in `z = (Re p_1, Im p_1, ..., Re p_n, Im p_n, q_0, Re q_1, ...)`.
pub(crate) struct ScalarJoint {
    basis: TrigBasis,
    cvec: DVector<f64>,
    gvec: DVector<f64>,
    lambda: f64,
    np: usize,
}

impl ScalarJoint {
    pub fn new(
        circle: &DiscreteCircle,
        c: &[Complex64],
        gamma: &CepstralData,
        lambda: f64,
    ) -> Result<Self> {
        let n = c.len() - 1;
        if gamma.degree() != n {
            return Err(Error::DimensionMismatch(format!(
                "cepstral data has degree {}, covariance data {n}",
                gamma.degree()
            )));
        }
        if n >= circle.half_period() {
            return Err(Error::DegreeTooLarge {
                degree: n,
                half_period: circle.half_period(),
            });
        }
        let mut gfull = vec![Complex64::new(0.0, 0.0)];
        gfull.extend_from_slice(gamma.coeffs());
        Ok(Self {
            basis: TrigBasis::new(circle, n),
            cvec: lag_vector(c),
            gvec: lag_vector(&gfull).rows(1, 2 * n).into_owned(),
            lambda,
            np: 2 * n,
        })
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn pack(&self, p: &PseudoPolynomial, q: &PseudoPolynomial) -> DVector<f64> {
        let n = self.basis.degree();
        let pp = p.with_degree(n).to_real_params();
        let qq = q.with_degree(n).to_real_params();
        DVector::from_iterator(self.np + qq.len(), pp[1..].iter().chain(qq.iter()).cloned())
    }

    pub fn split(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let mut p = DVector::zeros(self.np + 1);
        p[0] = 1.0;
        p.rows_mut(1, self.np).copy_from(&z.rows(0, self.np));
        (p, z.rows(self.np, z.len() - self.np).into_owned())
    }

    fn values(&self, z: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
        let (p, q) = self.split(z);
        let pv = self.basis.eval(&p);
        let qv = self.basis.eval(&q);
        (pv.iter().all(|&v| v > 0.0) && qv.iter().all(|&v| v > 0.0)).then_some((pv, qv))
    }
}

impl Objective for ScalarJoint {
    fn value(&self, z: &DVector<f64>) -> Option<f64> {
        let (pv, qv) = self.values(z)?;
        let (_, q) = self.split(z);
        let integral = pv
            .iter()
            .zip(qv.iter())
            .map(|(&p, &q)| p * (p.ln() - q.ln()) - self.lambda * p.ln())
            .sum::<f64>()
            / pv.len() as f64;
        Some(self.cvec.dot(&q) - self.gvec.dot(&z.rows(0, self.np)) + integral)
    }

    fn derivatives(&self, z: &DVector<f64>) -> Option<Derivatives> {
        let value = self.value(z)?;
        let (pv, qv) = self.values(z)?;
        let np = self.np;
        let nq = z.len() - np;
        let dim = z.len();

        let lp = pv.zip_map(&qv, |p, q| (p / q).ln() + 1.0 - self.lambda / p);
        let gp = self.basis.moments(&lp);
        let phi = pv.zip_map(&qv, |p, q| p / q);
        let gq = &self.cvec - self.basis.moments(&phi);
        let mut gradient = DVector::zeros(dim);
        gradient
            .rows_mut(0, np)
            .copy_from(&(gp.rows(1, np) - &self.gvec));
        gradient.rows_mut(np, nq).copy_from(&gq);

        let hpp = self
            .basis
            .gram(&pv.map(|p| 1.0 / p + self.lambda / (p * p)));
        let hpq = self.basis.gram(&qv.map(|q| -1.0 / q));
        let hqq = self.basis.gram(&pv.zip_map(&qv, |p, q| p / (q * q)));
        let mut hessian = DMatrix::zeros(dim, dim);
        hessian
            .view_mut((0, 0), (np, np))
            .copy_from(&hpp.view((1, 1), (np, np)));
        hessian
            .view_mut((0, np), (np, nq))
            .copy_from(&hpq.view((1, 0), (np, nq)));
        hessian
            .view_mut((np, 0), (nq, np))
            .copy_from(&hpq.view((0, 1), (nq, np)));
        hessian.view_mut((np, np), (nq, nq)).copy_from(&hqq);
        Some(Derivatives {
            value,
            gradient,
            hessian,
        })
    }

    fn margin(&self, z: &DVector<f64>) -> f64 {
        let (p, q) = self.split(z);
        let pmin = self.basis.eval(&p).min();
        let qmin = self.basis.eval(&q).min() / q[0].abs().max(f64::MIN_POSITIVE);
        pmin.min(qmin)
    }
}

fn joint_point(
    circle: &DiscreteCircle,
    c: &[Complex64],
    gamma: &CepstralData,
    lambda: f64,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<(ScalarJoint, DVector<f64>)> {
    if (p.coeff(0).re - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "numerator must have p_0 = 1, got {}",
            p.coeff(0).re
        )));
    }
    let n = c.len() - 1;
    if p.degree() > n || q.degree() > n {
        return Err(Error::DimensionMismatch(format!(
            "P and Q must have degree at most {n}"
        )));
    }
    let obj = ScalarJoint::new(circle, c, gamma, lambda)?;
    let z = obj.pack(p, q);
    Ok((obj, z))
}

/// Value of `J_lambda`; `+inf` outside the domain.
pub fn joint_dual_objective(
    circle: &DiscreteCircle,
    c: &[Complex64],
    gamma: &CepstralData,
    lambda: f64,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<f64> {
    let (obj, z) = joint_point(circle, c, gamma, lambda, p, q)?;
    Ok(obj.value(&z).unwrap_or(f64::INFINITY))
}

/// Gradient and Hessian of `J_lambda` in the joint parametrization
/// `(Re p_1, Im p_1, ..., q_0, Re q_1, Im q_1, ...)`.
pub fn joint_derivatives(
    circle: &DiscreteCircle,
    c: &[Complex64],
    gamma: &CepstralData,
    lambda: f64,
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let (obj, z) = joint_point(circle, c, gamma, lambda, p, q)?;
    let d = obj.derivatives(&z).ok_or_else(|| {
        let pv = eval_symbol(p, circle).unwrap_or_default();
        if pv.iter().any(|&v| !(v > 0.0)) {
            crate::scalar::first_nonpositive(circle, p)
        } else {
            crate::scalar::first_nonpositive(circle, q)
        }
    })?;
    Ok((d.gradient.iter().cloned().collect(), d.hessian))
}

/// Objective restricted to a contiguous block of variables.
struct Restricted<'a> {
    inner: &'a dyn Objective,
    base: DVector<f64>,
    start: usize,
    len: usize,
}

impl Restricted<'_> {
    fn embed(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut z = self.base.clone();
        z.rows_mut(self.start, self.len).copy_from(y);
        z
    }
}

impl Objective for Restricted<'_> {
    fn value(&self, y: &DVector<f64>) -> Option<f64> {
        self.inner.value(&self.embed(y))
    }

    fn derivatives(&self, y: &DVector<f64>) -> Option<Derivatives> {
        let d = self.inner.derivatives(&self.embed(y))?;
        Some(Derivatives {
            value: d.value,
            gradient: d.gradient.rows(self.start, self.len).into_owned(),
            hessian: d
                .hessian
                .view((self.start, self.start), (self.len, self.len))
                .into_owned(),
        })
    }

    fn margin(&self, y: &DVector<f64>) -> f64 {
        self.inner.margin(&self.embed(y))
    }
}

/// Joint Newton, with alternating P-steps and Q-steps when the joint
/// Hessian is too ill-conditioned for a reliable Newton direction.
pub(crate) fn minimize_joint(
    obj: &dyn Objective,
    z0: DVector<f64>,
    np: usize,
    cfg: &SolverConfig,
    scale: f64,
) -> Outcome {
    let out = newton::minimize(obj, z0, cfg, scale);
    let ill = out.hessian_condition.is_finite() && out.hessian_condition > CONDITION_LIMIT;
    let retry = matches!(out.status, Status::Stalled | Status::IterationCap)
        && (ill || out.status == Status::Stalled);
    if !retry || np == 0 {
        return out;
    }
    alternate(obj, out, np, cfg, scale)
}

fn alternate(
    obj: &dyn Objective,
    start: Outcome,
    np: usize,
    cfg: &SolverConfig,
    scale: f64,
) -> Outcome {
    let tol = cfg.gradient_tol * scale.abs().max(f64::MIN_POSITIVE);
    let dim = start.x.len();
    let mut z = start.x;
    let mut history = start.history;
    let mut iterations = start.iterations;
    let mut last = start.value;
    for _ in 0..cfg.max_iterations {
        for (s, len) in [(np, dim - np), (0, np)] {
            let sub = Restricted {
                inner: obj,
                base: z.clone(),
                start: s,
                len,
            };
            let y0 = z.rows(s, len).into_owned();
            let out = newton::minimize(&sub, y0, cfg, scale);
            iterations += out.iterations;
            z.rows_mut(s, len).copy_from(&out.x);
        }
        let Some(d) = obj.derivatives(&z) else { break };
        history.push(d.value);
        let gnorm = d.gradient.amax();
        if gnorm <= tol || (last - d.value).abs() <= 1e-15 * d.value.abs().max(1.0) {
            let status = if gnorm <= tol {
                Status::Converged
            } else if obj.margin(&z) < newton::BOUNDARY_MARGIN {
                Status::Boundary
            } else {
                Status::Stalled
            };
            return Outcome {
                value: d.value,
                gradient_norm: gnorm,
                iterations,
                history,
                status,
                hessian_condition: crate::linalg::condition_number(&d.hessian),
                x: z,
            };
        }
        last = d.value;
    }
    let d = obj.derivatives(&z);
    Outcome {
        value: d.as_ref().map_or(f64::NAN, |d| d.value),
        gradient_norm: d.as_ref().map_or(f64::INFINITY, |d| d.gradient.amax()),
        iterations,
        history,
        status: Status::IterationCap,
        hessian_condition: f64::NAN,
        x: z,
    }
}

/// Output of [`solve_joint`].
#[derive(Debug, Clone)]
pub struct JointSolution {
    /// Numerator with `p_0 = 1`.
    pub p: PseudoPolynomial,
    pub q: PseudoPolynomial,
    pub lambda: f64,
    /// `eps_1..eps_n`.
    pub epsilon: Vec<Complex64>,
    pub phi: DiscreteSpectrum,
    /// Largest `|c_k(P/Q) - c_k|`.
    pub covariance_residual: f64,
    /// Largest `|gamma_k(P/Q) - gamma_k - eps_k|`.
    pub cepstral_residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Solves the regularized joint problem; `lambda` must be positive.
pub fn solve_joint(
    c: &CovarianceData,
    gamma: &CepstralData,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<JointSolution> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization lambda must be positive, got {lambda}"
        )));
    }
    solve_joint_inner(c, gamma, lambda, cfg)
}

/// The unregularized problem (`lambda = 0`). Its minimizer may lie on the
/// boundary `min P = 0`; that outcome is reported as [`Error::Boundary`].
pub fn solve_joint_unregularized(
    c: &CovarianceData,
    gamma: &CepstralData,
    cfg: &SolverConfig,
) -> Result<JointSolution> {
    solve_joint_inner(c, gamma, 0.0, cfg)
}

fn solve_joint_inner(
    c: &CovarianceData,
    gamma: &CepstralData,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<JointSolution> {
    cfg.validate()?;
    let lags = c.scalar_lags()?;
    if !toeplitz_positive(c) {
        return Err(Error::Infeasible {
            reason: "Toeplitz matrix is not positive definite".into(),
            direction: Vec::new(),
        });
    }
    let circle = c.circle();
    let n = c.degree();
    let obj = ScalarJoint::new(&circle, &lags, gamma, lambda)?;
    let mut z0 = obj.pack(
        &PseudoPolynomial::one(),
        &PseudoPolynomial::constant(1.0 / lags[0].re),
    );
    let scale = lags[0].re.max(1.0);
    if lambda == 0.0 {
        // Cold Newton at lambda = 0 runs into min P = 0 even for interior
        // minimizers; follow the regularized path down instead.
        for mu in CONTINUATION {
            let warm = ScalarJoint::new(&circle, &lags, gamma, mu)?;
            let out = minimize_joint(&warm, z0.clone(), warm.np(), cfg, scale);
            if out.status != Status::Converged {
                break;
            }
            z0 = out.x;
        }
    }
    let out = minimize_joint(&obj, z0, obj.np(), cfg, scale);
    if lambda == 0.0 && out.status != Status::Converged {
        let margin = obj.margin(&out.x);
        if out.status == Status::Boundary || margin < 1e-6 {
            return Err(Error::Boundary(format!(
                "unregularized minimizer approaches min P = 0 (margin {margin:e})"
            )));
        }
    }
    crate::multivar::map_status(out.status, &out.x, out.iterations, out.gradient_norm)?;

    let (pvec, qvec) = obj.split(&out.x);
    let p = PseudoPolynomial::from_real_params(pvec.as_slice())?;
    let q = PseudoPolynomial::from_real_params(qvec.as_slice())?;
    let phi = DiscreteSpectrum::rational(&circle, &p, &q)?;
    let epsilon = epsilon_adjustment(&circle, &p, lambda, n)?;
    let cep = cepstral_moments(&phi, n)?;
    let cepstral_residual = cep
        .coeffs()
        .iter()
        .zip(gamma.coeffs())
        .zip(&epsilon)
        .map(|((a, g), e)| (a - g - e).norm())
        .fold(0.0, f64::max);
    let covariance_residual = crate::harmonics::moments_of(&phi, n)?
        .iter()
        .zip(&lags)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(JointSolution {
        p,
        q,
        lambda,
        epsilon,
        phi,
        covariance_residual,
        cepstral_residual,
        gradient_norm: out.gradient_norm,
        iterations: out.iterations,
    })
}
