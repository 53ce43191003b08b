//! Convex dual solver for the scalar circulant covariance extension problem.
//!
//! For data `c_0..c_n` and a numerator `P` positive on the grid, the unique
//! `Q` with `P/Q` matching the lags minimizes
//! `J_P(Q) = <c, q> - (1/2N) sum_j P(zeta_j) log Q(zeta_j)`.
//!
//! `Q` is parametrized by the real vector `x = (q_0, Re q_1, Im q_1, ...)`,
//! so that `Q(zeta_j) = (D x)_j` with basis columns `1, 2cos(k theta),
//! 2sin(k theta)`. The gradient is then `cvec - D^T Phi / 2N` and the Hessian
//! `D^T diag(P/Q^2) D / 2N`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cones::{toeplitz_positive, CovarianceData};
use crate::error::{Error, Result};
use crate::harmonics::{eval_symbol, DiscreteCircle, DiscreteSpectrum, PseudoPolynomial};
use crate::newton::{self, Derivatives, Objective, SolverConfig, Status};

/// Grid samples of the real trigonometric basis of pseudo-polynomials of degree n.
#[derive(Debug, Clone)]
pub(crate) struct TrigBasis {
    circle: DiscreteCircle,
    degree: usize,
    // (2N) x (2n+1)
    d: DMatrix<f64>,
}

impl TrigBasis {
    pub fn new(circle: &DiscreteCircle, degree: usize) -> Self {
        let len = circle.len();
        let dim = 2 * degree + 1;
        let mut d = DMatrix::zeros(len, dim);
        for s in 0..len {
            d[(s, 0)] = 1.0;
            for k in 1..=degree {
                // zeta^{-k} = cos(k theta) - i sin(k theta); P = p0 + 2 Re(p_k zeta^{-k})
                let z = circle.power(s, k as i64);
                d[(s, 2 * k - 1)] = 2.0 * z.re;
                d[(s, 2 * k)] = 2.0 * z.im;
            }
        }
        Self {
            circle: circle.clone(),
            degree,
            d,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Grid values of the pseudo-polynomial with real parameters `x`.
    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.d * x
    }

    /// `D^T f / 2N`: the moments of `f` in the real parametrization.
    pub fn moments(&self, f: &DVector<f64>) -> DVector<f64> {
        self.d.tr_mul(f) / self.circle.len() as f64
    }

    /// `D^T diag(w) D / 2N`.
    pub fn gram(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.d.clone();
        for (mut row, &wi) in scaled.row_iter_mut().zip(w.iter()) {
            row *= wi;
        }
        let g = self.d.tr_mul(&scaled) / self.circle.len() as f64;
        (&g + g.transpose()) * 0.5
    }
}

/// Real parameter vector `(c_0, 2Re c_1, 2Im c_1, ...)` so that
/// `<c, q> = cvec . x`.
pub(crate) fn lag_vector(c: &[Complex64]) -> DVector<f64> {
    let mut v = Vec::with_capacity(2 * c.len() - 1);
    v.push(c[0].re);
    for ck in &c[1..] {
        v.push(2.0 * ck.re);
        v.push(2.0 * ck.im);
    }
    DVector::from_vec(v)
}

pub(crate) fn params_of(q: &PseudoPolynomial) -> DVector<f64> {
    DVector::from_vec(q.to_real_params())
}

pub(crate) fn poly_of(x: &DVector<f64>) -> PseudoPolynomial {
    PseudoPolynomial::from_real_params(x.as_slice()).expect("odd-length parameter vector")
}

pub(crate) struct ScalarDual {
    basis: TrigBasis,
    cvec: DVector<f64>,
    p_values: DVector<f64>,
}

impl ScalarDual {
    pub fn new(circle: &DiscreteCircle, c: &[Complex64], p: &PseudoPolynomial) -> Result<Self> {
        let n = c.len() - 1;
        if p.degree() > n {
            return Err(Error::DimensionMismatch(format!(
                "numerator degree {} exceeds data degree {n}",
                p.degree()
            )));
        }
        if n >= circle.half_period() {
            return Err(Error::DegreeTooLarge {
                degree: n,
                half_period: circle.half_period(),
            });
        }
        let p_values = DVector::from_vec(eval_symbol(p, circle)?);
        Ok(Self {
            basis: TrigBasis::new(circle, n),
            cvec: lag_vector(c),
            p_values,
        })
    }

    fn q_values(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let q = self.basis.eval(x);
        q.iter().all(|&v| v > 0.0).then_some(q)
    }

    pub fn hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let q = self.q_values(x)?;
        let w = self.p_values.zip_map(&q, |p, q| p / (q * q));
        Some(self.basis.gram(&w))
    }
}

impl Objective for ScalarDual {
    fn value(&self, x: &DVector<f64>) -> Option<f64> {
        let q = self.q_values(x)?;
        let log_term = self
            .p_values
            .iter()
            .zip(q.iter())
            .map(|(p, q)| p * q.ln())
            .sum::<f64>()
            / q.len() as f64;
        Some(self.cvec.dot(x) - log_term)
    }

    fn derivatives(&self, x: &DVector<f64>) -> Option<Derivatives> {
        let value = self.value(x)?;
        let q = self.q_values(x)?;
        let phi = self.p_values.zip_map(&q, |p, q| p / q);
        let w = self.p_values.zip_map(&q, |p, q| p / (q * q));
        Some(Derivatives {
            value,
            gradient: &self.cvec - self.basis.moments(&phi),
            hessian: self.basis.gram(&w),
        })
    }

    fn margin(&self, x: &DVector<f64>) -> f64 {
        let q = self.basis.eval(x);
        q.min() / x[0].abs().max(f64::MIN_POSITIVE)
    }
}

/// Value of the dual functional; `+inf` when `Q` is not positive on the grid.
pub fn dual_objective(
    circle: &DiscreteCircle,
    c: &[Complex64],
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<f64> {
    let n = c.len() - 1;
    let dual = ScalarDual::new(circle, c, p)?;
    let x = params_of(&q.with_degree(n));
    Ok(dual.value(&x).unwrap_or(f64::INFINITY))
}

/// Gradient in the real parametrization `(q_0, Re q_1, Im q_1, ...)`:
/// `(c_0 - m_0, 2 Re(c_k - m_k), 2 Im(c_k - m_k))` with `m` the moments of `P/Q`.
pub fn dual_gradient(
    circle: &DiscreteCircle,
    c: &[Complex64],
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<Vec<f64>> {
    let n = c.len() - 1;
    let dual = ScalarDual::new(circle, c, p)?;
    let x = params_of(&q.with_degree(n));
    let d = dual
        .derivatives(&x)
        .ok_or_else(|| first_nonpositive(circle, q))?;
    Ok(d.gradient.iter().cloned().collect())
}

pub fn dual_hessian(
    circle: &DiscreteCircle,
    c: &[Complex64],
    p: &PseudoPolynomial,
    q: &PseudoPolynomial,
) -> Result<DMatrix<f64>> {
    let n = c.len() - 1;
    let dual = ScalarDual::new(circle, c, p)?;
    let x = params_of(&q.with_degree(n));
    dual.hessian(&x).ok_or_else(|| first_nonpositive(circle, q))
}

pub(crate) fn first_nonpositive(circle: &DiscreteCircle, q: &PseudoPolynomial) -> Error {
    match eval_symbol(q, circle) {
        Ok(values) => {
            let s = values.iter().position(|&v| !(v > 0.0)).unwrap_or(0);
            Error::NonPositive {
                index: circle.index(s),
                value: values.get(s).copied().unwrap_or(f64::NAN),
            }
        }
        Err(e) => e,
    }
}

/// `(1/2N) sum_j P(zeta_j) log Phi(zeta_j)`.
pub fn primal_value(phi: &DiscreteSpectrum, p: &PseudoPolynomial) -> Result<f64> {
    phi.check_positive()?;
    let pv = eval_symbol(p, phi.circle())?;
    Ok(pv
        .iter()
        .zip(phi.values())
        .map(|(p, f)| p * f.ln())
        .sum::<f64>()
        / pv.len() as f64)
}

/// Output of [`solve_dual`].
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub q: PseudoPolynomial,
    pub p: PseudoPolynomial,
    pub phi: DiscreteSpectrum,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Dual objective after each accepted Newton step.
    pub history: Vec<f64>,
}

impl DualSolution {
    /// Largest deviation `|c_k(P/Q) - c_k|`.
    pub fn moment_residual(&self, c: &[Complex64]) -> f64 {
        let m = crate::harmonics::moments_of(&self.phi, c.len() - 1).expect("degree checked");
        m.iter()
            .zip(c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Solves for the unique `Q` with `P/Q` matching `c` on the grid.
pub fn solve_dual(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    cfg: &SolverConfig,
) -> Result<DualSolution> {
    solve_dual_from(c, p, None, cfg)
}

/// [`solve_dual`] from a given interior starting point.
pub fn solve_dual_from(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    initial_q: Option<&PseudoPolynomial>,
    cfg: &SolverConfig,
) -> Result<DualSolution> {
    cfg.validate()?;
    let lags = c.scalar_lags()?;
    let circle = c.circle();
    let n = c.degree();
    let pv = eval_symbol(p, &circle)?;
    if let Some(s) = pv.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive {
            index: circle.index(s),
            value: pv[s],
        });
    }
    if !toeplitz_positive(c) {
        return Err(Error::Infeasible {
            reason: "Toeplitz matrix is not positive definite".into(),
            direction: Vec::new(),
        });
    }
    let dual = ScalarDual::new(&circle, &lags, p)?;

    let x0 = match initial_q {
        Some(q) => {
            let x = params_of(&q.with_degree(n));
            if dual.value(&x).is_none() {
                return Err(first_nonpositive(&circle, q));
            }
            x
        }
        None => {
            // Constant Q with int P/Q = c_0.
            let mut x = DVector::zeros(2 * n + 1);
            x[0] = p.coeff(0).re / lags[0].re;
            x
        }
    };

    let out = newton::minimize(&dual, x0, cfg, lags[0].re);
    match out.status {
        Status::Converged => {}
        Status::Unbounded { direction } => {
            return Err(Error::Infeasible {
                reason: "dual objective is unbounded below".into(),
                direction,
            })
        }
        Status::Boundary => {
            let norm = out.x.norm();
            return Err(Error::Infeasible {
                reason: "iterates approach the boundary of the positive cone".into(),
                direction: out.x.iter().map(|v| v / norm).collect(),
            });
        }
        Status::IterationCap | Status::Stalled => {
            return Err(Error::Indeterminate {
                iterations: out.iterations,
                gradient_norm: out.gradient_norm,
            })
        }
    }

    let q = poly_of(&out.x);
    let phi = DiscreteSpectrum::rational(&circle, p, &q)?;
    let primal = primal_value(&phi, p)?;
    Ok(DualSolution {
        q,
        p: p.with_degree(n),
        phi,
        gradient_norm: out.gradient_norm,
        iterations: out.iterations,
        primal_value: primal,
        dual_value: out.value,
        history: out.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{grid, moments_of};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn objective_examples() {
        let circle = grid(4).unwrap();
        let one = PseudoPolynomial::one();
        let v = dual_objective(&circle, &[c(1.0), c(0.0), c(0.0)], &one, &one).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let e = std::f64::consts::E;
        let v = dual_objective(
            &circle,
            &[c(1.0), c(0.0)],
            &one,
            &PseudoPolynomial::constant(e),
        )
        .unwrap();
        assert!((v - (e - 1.0)).abs() < 1e-15);
        let bad = PseudoPolynomial::real(&[0.5, 0.5]).unwrap();
        let v = dual_objective(&circle, &[c(1.0), c(0.0)], &one, &bad).unwrap();
        assert!(v.is_infinite());
        assert!(matches!(
            dual_gradient(&circle, &[c(1.0), c(0.0)], &one, &bad),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn gradient_vanishes_for_constant_case() {
        let circle = grid(6).unwrap();
        let lags = [c(2.0), c(0.0), c(0.0)];
        let g = dual_gradient(
            &circle,
            &lags,
            &PseudoPolynomial::one(),
            &PseudoPolynomial::constant(0.5),
        )
        .unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn constant_solution() {
        let data = CovarianceData::scalar_real(3, &[4.0]).unwrap();
        let sol = solve_dual(&data, &PseudoPolynomial::one(), &SolverConfig::default()).unwrap();
        assert!((sol.q.coeff(0).re - 0.25).abs() < 1e-14);
        assert!(sol.phi.values().iter().all(|v| (v - 4.0).abs() < 1e-12));
    }

    #[test]
    fn white_noise_gives_q_equal_p() {
        let data = CovarianceData::scalar_real(6, &[1.0, 0.0, 0.0]).unwrap();
        let p = PseudoPolynomial::real(&[1.25, 0.5, 0.0]).unwrap();
        let sol = solve_dual(&data, &p, &SolverConfig::default()).unwrap();
        assert!(sol.q.max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn recovers_seeded_denominator() {
        let circle = grid(8).unwrap();
        let q_true = PseudoPolynomial::real(&[1.25, 0.5, 0.05]).unwrap();
        let phi = DiscreteSpectrum::rational(&circle, &PseudoPolynomial::one(), &q_true).unwrap();
        let lags = moments_of(&phi, 2).unwrap();
        let data = CovarianceData::scalar(8, &lags).unwrap();
        let sol = solve_dual(&data, &PseudoPolynomial::one(), &SolverConfig::default()).unwrap();
        assert!(sol.q.max_abs_diff(&q_true) <= 1e-6);
        assert!(sol.moment_residual(&lags) <= 1e-8 * lags[0].re);
        assert!(sol.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn nonpositive_numerator_rejected() {
        let data = CovarianceData::scalar_real(4, &[1.0, 0.2]).unwrap();
        let p = PseudoPolynomial::real(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            solve_dual(&data, &p, &SolverConfig::default()),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn primal_value_examples() {
        let circle = grid(3).unwrap();
        let one = PseudoPolynomial::one();
        let flat = DiscreteSpectrum::new(circle.clone(), vec![1.0; 6]).unwrap();
        assert_eq!(primal_value(&flat, &one).unwrap(), 0.0);
        let e = DiscreteSpectrum::new(circle.clone(), vec![std::f64::consts::E; 6]).unwrap();
        assert!((primal_value(&e, &one).unwrap() - 1.0).abs() < 1e-15);
        let mut v = vec![1.0; 6];
        v[2] = 0.0;
        let z = DiscreteSpectrum::new(circle, v).unwrap();
        assert!(matches!(
            primal_value(&z, &one),
            Err(Error::NonPositive { .. })
        ));
    }
}
