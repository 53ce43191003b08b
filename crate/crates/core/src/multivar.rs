//! Block-circulant generalization: scalar numerator `P`, matrix denominator `Q`.
//!
//! The dual is `J(Q) = <C, Q> - (1/2N) sum_j P(zeta_j) log det Q(zeta_j)`
//! over Hermitian matrix pseudo-polynomials `Q(z) = sum_k Q_k z^{-k}`.
//!
//! Real parametrization: `Q_0` Hermitian with `m^2` parameters (diagonal
//! entries, then real and imaginary parts of each upper off-diagonal entry,
//! row-major), followed by `Re, Im` of every entry of `Q_1, ..., Q_n`,
//! row-major. For `m = 1` this is the scalar ordering `(q_0, Re q_1, Im q_1, ...)`.
//!
//! Each parameter `a` belongs to a lag `k_a` and a unit matrix `E_a` with
//! basis function `B_a(z) = E_a z^{-k} + E_a^* z^k`. The gradient is then
//! `2 Re tr(E_a^* (C_k - Phi_k))` and the Hessian `∫ P tr(Q^-1 B_a Q^-1 B_b)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cepstral::{epsilon_adjustment, CepstralData};
use crate::circulant::CirculantMatrix;
use crate::cones::{toeplitz_positive, CovarianceData, FullPeriodicSequence};
use crate::error::{Error, Result};
use crate::harmonics::{eval_symbol, DiscreteCircle, PseudoPolynomial};
use crate::json::EntryJson;
use crate::linalg::{self, CMat};
use crate::newton::{self, Derivatives, Objective, SolverConfig, Status};
use crate::scalar::TrigBasis;

/// Eigenvalue floor (relative to `|Q_0|`) below which a trial point is rejected.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// `Q(z) = Q_0 + sum_{k>=1} (Q_k z^{-k} + Q_k^* z^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPseudoPolynomial {
    block: usize,
    coeffs: Vec<CMat>,
}

impl MatrixPseudoPolynomial {
    /// From `Q_0..Q_n`; `Q_0` must be Hermitian.
    pub fn new(coeffs: Vec<CMat>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::DimensionMismatch("no coefficients".into()));
        };
        let m = first.nrows();
        if m == 0 || coeffs.iter().any(|c| c.nrows() != m || c.ncols() != m) {
            return Err(Error::DimensionMismatch(
                "coefficients must be square blocks of one size".into(),
            ));
        }
        if coeffs
            .iter()
            .flat_map(|c| c.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let mut coeffs = coeffs;
        coeffs[0] = linalg::hermitize(&coeffs[0], 0)?;
        Ok(Self { block: m, coeffs })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            block: m,
            coeffs: vec![linalg::cidentity(m)],
        }
    }

    /// `P (x) I_m`.
    pub fn from_scalar(p: &PseudoPolynomial, m: usize) -> Self {
        Self {
            block: m,
            coeffs: p.coeffs().iter().map(|&z| linalg::cscalar(m, z)).collect(),
        }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Q_0..Q_n`.
    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// `Q_k` for any k, with `Q_{-k} = Q_k^*` and zero beyond the degree.
    pub fn coeff(&self, k: i64) -> CMat {
        let i = k.unsigned_abs() as usize;
        match self.coeffs.get(i) {
            None => CMat::zeros(self.block, self.block),
            Some(c) if k < 0 => c.adjoint(),
            Some(c) => c.clone(),
        }
    }

    pub fn with_degree(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, CMat::zeros(self.block, self.block));
        Self {
            block: self.block,
            coeffs,
        }
    }

    pub fn eval_unit(&self, z: Complex64) -> CMat {
        let mut acc = self.coeffs[0].clone();
        let zi = z.conj();
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &self.coeffs[1..] {
            pw *= zi;
            acc += c * pw + c.adjoint() * pw.conj();
        }
        acc
    }

    /// Scalar pseudo-polynomial when `m = 1`.
    pub fn to_scalar(&self) -> Result<PseudoPolynomial> {
        if self.block != 1 {
            return Err(Error::DimensionMismatch(format!(
                "block size {} is not scalar",
                self.block
            )));
        }
        PseudoPolynomial::new(self.coeffs.iter().map(|c| c[(0, 0)]).collect())
    }

    pub fn to_real_params(&self) -> Vec<f64> {
        let m = self.block;
        let mut out = Vec::with_capacity(m * m * (2 * self.degree() + 1));
        let q0 = &self.coeffs[0];
        for i in 0..m {
            out.push(q0[(i, i)].re);
            for j in i + 1..m {
                out.push(q0[(i, j)].re);
                out.push(q0[(i, j)].im);
            }
        }
        for c in &self.coeffs[1..] {
            for i in 0..m {
                for j in 0..m {
                    out.push(c[(i, j)].re);
                    out.push(c[(i, j)].im);
                }
            }
        }
        out
    }

    pub fn from_real_params(m: usize, params: &[f64]) -> Result<Self> {
        let lag0 = m * m;
        if m == 0 || params.len() < lag0 || !(params.len() - lag0).is_multiple_of(2 * m * m) {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters do not describe a {m}x{m} pseudo-polynomial",
                params.len()
            )));
        }
        let n = (params.len() - lag0) / (2 * m * m);
        let mut it = params.iter().copied();
        let mut q0 = CMat::zeros(m, m);
        for i in 0..m {
            q0[(i, i)] = Complex64::new(it.next().unwrap(), 0.0);
            for j in i + 1..m {
                let z = Complex64::new(it.next().unwrap(), it.next().unwrap());
                q0[(i, j)] = z;
                q0[(j, i)] = z.conj();
            }
        }
        let mut coeffs = vec![q0];
        for _ in 0..n {
            let mut c = CMat::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    c[(i, j)] = Complex64::new(it.next().unwrap(), it.next().unwrap());
                }
            }
            coeffs.push(c);
        }
        Ok(Self { block: m, coeffs })
    }

    /// Largest coefficient deviation, padding the shorter one with zeros.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.degree().max(other.degree()) as i64;
        (0..=n)
            .map(|k| linalg::max_abs(&(self.coeff(k) - other.coeff(k))))
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixPolyJson {
    m: usize,
    n: usize,
    coeffs: Vec<EntryJson>,
}

impl Serialize for MatrixPseudoPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixPolyJson {
            m: self.block,
            n: self.degree(),
            coeffs: self.coeffs.iter().map(EntryJson::from_block).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixPseudoPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixPolyJson::deserialize(d)?;
        if raw.coeffs.len() != raw.n + 1 {
            return Err(D::Error::custom(format!(
                "expected n+1 = {} coefficients, got {}",
                raw.n + 1,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|e| e.to_block(raw.m))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Self::new(coeffs).map_err(D::Error::custom)
    }
}

/// Grid values `Q(zeta_j)` in slot order.
pub fn eval_block_symbol(q: &MatrixPseudoPolynomial, circle: &DiscreteCircle) -> Result<Vec<CMat>> {
    if q.degree() >= 2 * circle.half_period() {
        return Err(Error::DegreeTooLarge {
            degree: q.degree(),
            half_period: circle.half_period(),
        });
    }
    Ok((0..circle.len())
        .map(|s| {
            let mut acc = q.coeffs[0].clone();
            for (k, c) in q.coeffs.iter().enumerate().skip(1) {
                let z = circle.power(s, -(k as i64));
                acc += c * z + c.adjoint() * z.conj();
            }
            acc
        })
        .collect())
}

/// Matrix moments `C_k = (1/2N) sum_j zeta_j^k Phi(zeta_j)` for `k = 0..n`.
pub fn block_moments(circle: &DiscreteCircle, values: &[CMat], n: usize) -> Result<Vec<CMat>> {
    if values.len() != circle.len() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} grid values, got {}",
            circle.len(),
            values.len()
        )));
    }
    if n > circle.half_period() {
        return Err(Error::IndexOutOfRange {
            index: n as i64,
            limit: circle.half_period(),
        });
    }
    let m = values[0].nrows();
    let scale = 1.0 / circle.len() as f64;
    Ok((0..=n as i64)
        .map(|k| {
            let mut acc = CMat::zeros(m, m);
            for (s, v) in values.iter().enumerate() {
                acc += v * circle.power(s, k);
            }
            acc * Complex64::new(scale, 0.0)
        })
        .collect())
}

/// Grid values of `P Q^{-1}`.
pub fn block_spectrum(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<Vec<CMat>> {
    let pv = eval_symbol(p, circle)?;
    let qv = eval_block_symbol(q, circle)?;
    qv.iter()
        .zip(&pv)
        .enumerate()
        .map(|(s, (qj, &pj))| {
            let floor = EIGEN_FLOOR * linalg::max_abs(&q.coeffs[0]);
            match linalg::hpd_inverse_logdet(qj, floor) {
                Some((inv, _)) => Ok(inv * Complex64::new(pj, 0.0)),
                None => Err(Error::NotPositiveDefinite {
                    index: circle.index(s),
                    min_eig: linalg::min_eigenvalue(qj),
                }),
            }
        })
        .collect()
}

/// Parameter layout shared by the block objectives.
#[derive(Debug, Clone)]
pub(crate) struct BlockBasis {
    circle: DiscreteCircle,
    m: usize,
    n: usize,
    /// `(lag, E_a)` per real parameter.
    units: Vec<(usize, CMat)>,
}

impl BlockBasis {
    pub fn new(circle: &DiscreteCircle, m: usize, n: usize) -> Self {
        let unit = |i: usize, j: usize, v: Complex64| {
            let mut e = CMat::zeros(m, m);
            e[(i, j)] = v;
            e
        };
        let one = Complex64::new(1.0, 0.0);
        let i_unit = Complex64::new(0.0, 1.0);
        let mut units = Vec::new();
        for i in 0..m {
            units.push((0, unit(i, i, Complex64::new(0.5, 0.0))));
            for j in i + 1..m {
                units.push((0, unit(i, j, one)));
                units.push((0, unit(i, j, i_unit)));
            }
        }
        for k in 1..=n {
            for i in 0..m {
                for j in 0..m {
                    units.push((k, unit(i, j, one)));
                    units.push((k, unit(i, j, i_unit)));
                }
            }
        }
        Self {
            circle: circle.clone(),
            m,
            n,
            units,
        }
    }

    pub fn dim(&self) -> usize {
        self.units.len()
    }

    /// `(2 Re tr(E_a^* M_k))_a` for lag blocks `M_0..M_n`.
    pub fn pair(&self, lags: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.units
                .iter()
                .map(|(k, e)| 2.0 * (e.adjoint() * &lags[*k]).trace().re),
        )
    }

    /// `B_a(zeta_s)` for every parameter.
    pub fn basis_at(&self, s: usize) -> Vec<CMat> {
        let powers: Vec<Complex64> = (0..=self.n)
            .map(|k| self.circle.power(s, -(k as i64)))
            .collect();
        self.units
            .iter()
            .map(|(k, e)| e * powers[*k] + e.adjoint() * powers[*k].conj())
            .collect()
    }

    pub fn poly(&self, x: &DVector<f64>) -> MatrixPseudoPolynomial {
        MatrixPseudoPolynomial::from_real_params(self.m, x.as_slice())
            .expect("parameter count matches the basis")
    }
}

/// Grid data at a point of the block dual domain.
struct BlockPoint {
    inverses: Vec<CMat>,
    logdets: Vec<f64>,
}

fn block_point(basis: &BlockBasis, x: &DVector<f64>) -> Option<BlockPoint> {
    let q = basis.poly(x);
    let values = eval_block_symbol(&q, &basis.circle).ok()?;
    let floor = EIGEN_FLOOR * linalg::max_abs(&q.coeffs[0]).max(f64::MIN_POSITIVE);
    let mut inverses = Vec::with_capacity(values.len());
    let mut logdets = Vec::with_capacity(values.len());
    for v in &values {
        let (inv, ld) = linalg::hpd_inverse_logdet(v, floor)?;
        inverses.push(inv);
        logdets.push(ld);
    }
    Some(BlockPoint { inverses, logdets })
}

fn block_margin(basis: &BlockBasis, x: &DVector<f64>) -> f64 {
    let q = basis.poly(x);
    let Ok(values) = eval_block_symbol(&q, &basis.circle) else {
        return f64::NEG_INFINITY;
    };
    let scale = linalg::max_abs(&q.coeffs[0]).max(f64::MIN_POSITIVE);
    values
        .iter()
        .map(linalg::min_eigenvalue)
        .fold(f64::INFINITY, f64::min)
        / scale
}

/// `(1/2N) sum_j w_j tr(Q_j^-1 B_a Q_j^-1 B_b)`.
fn block_hessian(basis: &BlockBasis, point: &BlockPoint, weights: &[f64]) -> DMatrix<f64> {
    let d = basis.dim();
    let m = basis.m;
    let mut h = DMatrix::zeros(d, d);
    for (s, inv) in point.inverses.iter().enumerate() {
        let bs = basis.basis_at(s);
        let ms: Vec<CMat> = bs.iter().map(|b| inv * b).collect();
        let w = weights[s];
        for a in 0..d {
            for b in a..d {
                let mut t = 0.0;
                for p in 0..m {
                    for q in 0..m {
                        t += (ms[a][(p, q)] * ms[b][(q, p)]).re;
                    }
                }
                h[(a, b)] += w * t;
            }
        }
    }
    let scale = 1.0 / basis.circle.len() as f64;
    for a in 0..d {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    h * scale
}

/// `(1/2N) sum_j P_j Q_j^{-1} zeta_j^k` for `k = 0..n`.
fn weighted_moments(basis: &BlockBasis, point: &BlockPoint, p_values: &[f64]) -> Vec<CMat> {
    let values: Vec<CMat> = point
        .inverses
        .iter()
        .zip(p_values)
        .map(|(inv, &p)| inv * Complex64::new(p, 0.0))
        .collect();
    block_moments(&basis.circle, &values, basis.n).expect("degree below N")
}

pub(crate) struct BlockDual {
    basis: BlockBasis,
    cvec: DVector<f64>,
    p_values: Vec<f64>,
}

impl BlockDual {
    pub fn new(c: &CovarianceData, p: &PseudoPolynomial) -> Result<Self> {
        let circle = c.circle();
        let n = c.degree();
        if p.degree() > n {
            return Err(Error::DimensionMismatch(format!(
                "numerator degree {} exceeds data degree {n}",
                p.degree()
            )));
        }
        let basis = BlockBasis::new(&circle, c.block(), n);
        let cvec = basis.pair(c.lags());
        Ok(Self {
            p_values: eval_symbol(p, &circle)?,
            basis,
            cvec,
        })
    }
}

impl Objective for BlockDual {
    fn value(&self, x: &DVector<f64>) -> Option<f64> {
        let pt = block_point(&self.basis, x)?;
        let log_term = pt
            .logdets
            .iter()
            .zip(&self.p_values)
            .map(|(l, p)| p * l)
            .sum::<f64>()
            / self.p_values.len() as f64;
        Some(self.cvec.dot(x) - log_term)
    }

    fn derivatives(&self, x: &DVector<f64>) -> Option<Derivatives> {
        let pt = block_point(&self.basis, x)?;
        let len = self.p_values.len() as f64;
        let log_term = pt
            .logdets
            .iter()
            .zip(&self.p_values)
            .map(|(l, p)| p * l)
            .sum::<f64>()
            / len;
        let phi = weighted_moments(&self.basis, &pt, &self.p_values);
        Some(Derivatives {
            value: self.cvec.dot(x) - log_term,
            gradient: &self.cvec - self.basis.pair(&phi),
            hessian: block_hessian(&self.basis, &pt, &self.p_values),
        })
    }

    fn margin(&self, x: &DVector<f64>) -> f64 {
        block_margin(&self.basis, x)
    }
}

fn check_interior(circle: &DiscreteCircle, p: &PseudoPolynomial) -> Result<()> {
    let pv = eval_symbol(p, circle)?;
    if let Some(s) = pv.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive {
            index: circle.index(s),
            value: pv[s],
        });
    }
    Ok(())
}

fn block_x(c: &CovarianceData, q: &MatrixPseudoPolynomial) -> Result<DVector<f64>> {
    if q.block() != c.block() {
        return Err(Error::DimensionMismatch(format!(
            "Q has block size {}, data has {}",
            q.block(),
            c.block()
        )));
    }
    if q.degree() > c.degree() {
        return Err(Error::DimensionMismatch(format!(
            "Q degree {} exceeds data degree {}",
            q.degree(),
            c.degree()
        )));
    }
    Ok(DVector::from_vec(
        q.with_degree(c.degree()).to_real_params(),
    ))
}

/// Block dual value; `+inf` when `Q` is not positive definite on the grid.
pub fn block_dual_objective(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<f64> {
    let dual = BlockDual::new(c, p)?;
    Ok(dual.value(&block_x(c, q)?).unwrap_or(f64::INFINITY))
}

pub fn block_dual_gradient(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<Vec<f64>> {
    let dual = BlockDual::new(c, p)?;
    let d = dual
        .derivatives(&block_x(c, q)?)
        .ok_or_else(|| first_non_pd(&c.circle(), q))?;
    Ok(d.gradient.iter().cloned().collect())
}

pub fn block_dual_hessian(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<DMatrix<f64>> {
    let dual = BlockDual::new(c, p)?;
    let d = dual
        .derivatives(&block_x(c, q)?)
        .ok_or_else(|| first_non_pd(&c.circle(), q))?;
    Ok(d.hessian)
}

fn first_non_pd(circle: &DiscreteCircle, q: &MatrixPseudoPolynomial) -> Error {
    match eval_block_symbol(q, circle) {
        Ok(values) => {
            let eigs: Vec<f64> = values.iter().map(linalg::min_eigenvalue).collect();
            let s = eigs
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(s, _)| s)
                .unwrap_or(0);
            Error::NotPositiveDefinite {
                index: circle.index(s),
                min_eig: eigs[s],
            }
        }
        Err(e) => e,
    }
}

/// Output of [`solve_dual_block`].
#[derive(Debug, Clone)]
pub struct BlockDualSolution {
    pub q: MatrixPseudoPolynomial,
    pub p: PseudoPolynomial,
    /// `P Q^{-1}` on the grid, slot order.
    pub phi: Vec<CMat>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub dual_value: f64,
    pub history: Vec<f64>,
}

impl BlockDualSolution {
    /// Largest entry of `C_k(P Q^-1) - C_k` over `k = 0..n`.
    pub fn moment_residual(&self, c: &CovarianceData) -> f64 {
        let m = block_moments(&c.circle(), &self.phi, c.degree()).expect("degree checked");
        m.iter()
            .zip(c.lags())
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn map_status(
    status: Status,
    x: &DVector<f64>,
    iterations: usize,
    gnorm: f64,
) -> Result<()> {
    match status {
        Status::Converged => Ok(()),
        Status::Unbounded { direction } => Err(Error::Infeasible {
            reason: "dual objective is unbounded below".into(),
            direction,
        }),
        Status::Boundary => {
            let norm = x.norm();
            Err(Error::Infeasible {
                reason: "iterates approach the boundary of the positive cone".into(),
                direction: x.iter().map(|v| v / norm).collect(),
            })
        }
        Status::IterationCap | Status::Stalled => Err(Error::Indeterminate {
            iterations,
            gradient_norm: gnorm,
        }),
    }
}

/// Solves the block dual for a scalar numerator `P`.
pub fn solve_dual_block(
    c: &CovarianceData,
    p: &PseudoPolynomial,
    cfg: &SolverConfig,
) -> Result<BlockDualSolution> {
    cfg.validate()?;
    let circle = c.circle();
    check_interior(&circle, p)?;
    if !toeplitz_positive(c) {
        return Err(Error::Infeasible {
            reason: "block Toeplitz matrix is not positive definite".into(),
            direction: Vec::new(),
        });
    }
    let dual = BlockDual::new(c, p)?;
    // Q = p_0 C_0^{-1} matches the zeroth moment.
    let c0_inv = c.lags()[0]
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { index: 0 })?;
    let q0 = MatrixPseudoPolynomial::new(vec![c0_inv * Complex64::new(p.coeff(0).re, 0.0)])?;
    let x0 = block_x(c, &q0)?;
    let scale = linalg::max_abs(&c.lags()[0]);
    let out = newton::minimize(&dual, x0, cfg, scale);
    map_status(out.status, &out.x, out.iterations, out.gradient_norm)?;

    let q = dual.basis.poly(&out.x);
    let phi = block_spectrum(&circle, p, &q)?;
    Ok(BlockDualSolution {
        q,
        p: p.with_degree(c.degree()),
        phi,
        gradient_norm: out.gradient_norm,
        iterations: out.iterations,
        dual_value: out.value,
        history: out.history,
    })
}

/// Block extension of a solved pair with its covariance `Sigma = Q^{-1} P`.
#[derive(Debug, Clone)]
pub struct BlockExtension {
    pub sequence: FullPeriodicSequence,
    pub sigma: CirculantMatrix,
}

pub fn block_extension_and_sigma(
    circle: &DiscreteCircle,
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<BlockExtension> {
    let phi = block_spectrum(circle, p, q)?;
    let lags = block_moments(circle, &phi, circle.half_period())?;
    let sequence = FullPeriodicSequence::from_half(circle.half_period(), lags)?;
    let sigma = CirculantMatrix::from_values(circle, phi)?;
    Ok(BlockExtension { sequence, sigma })
}

/// Matrix bilateral ARMA model `sum_k Q_k y(t-k) = sum_k p_k e(t-k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixArmaModel {
    pub kind: String,
    pub order: usize,
    pub q: MatrixPseudoPolynomial,
    pub p: PseudoPolynomial,
}

impl MatrixArmaModel {
    /// Spectral density on the grid.
    pub fn spectrum(&self, circle: &DiscreteCircle) -> Result<Vec<CMat>> {
        block_spectrum(circle, &self.p, &self.q)
    }

    pub fn is_autoregressive(&self) -> bool {
        self.p.degree() == 0 || self.p.coeffs()[1..].iter().all(|z| z.norm() == 0.0)
    }
}

pub fn bilateral_matrix_arma(
    p: &PseudoPolynomial,
    q: &MatrixPseudoPolynomial,
) -> Result<MatrixArmaModel> {
    let order = p.degree().max(q.degree());
    Ok(MatrixArmaModel {
        kind: "bilateral".into(),
        order,
        q: q.with_degree(order),
        p: p.with_degree(order),
    })
}

/// Regularized joint dual with scalar `P` (`p_0 = 1`) and matrix `Q`:
/// `<C,Q> - <gamma,p> + ∫ (m P log P - P log det Q) - lambda ∫ log P`.
/// Stationarity gives `cepstrum(log det (P Q^-1)) = gamma + eps`.
pub(crate) struct BlockJoint {
    basis: BlockBasis,
    trig: TrigBasis,
    cvec: DVector<f64>,
    gvec: DVector<f64>,
    lambda: f64,
    np: usize,
}

impl BlockJoint {
    pub fn new(c: &CovarianceData, gamma: &CepstralData, lambda: f64) -> Result<Self> {
        let n = c.degree();
        if gamma.degree() != n {
            return Err(Error::DimensionMismatch(format!(
                "cepstral data has degree {}, covariance data {n}",
                gamma.degree()
            )));
        }
        let circle = c.circle();
        let basis = BlockBasis::new(&circle, c.block(), n);
        let cvec = basis.pair(c.lags());
        let mut gfull = vec![Complex64::new(0.0, 0.0)];
        gfull.extend_from_slice(gamma.coeffs());
        let gvec = crate::scalar::lag_vector(&gfull)
            .rows(1, 2 * n)
            .into_owned();
        Ok(Self {
            trig: TrigBasis::new(&circle, n),
            basis,
            cvec,
            gvec,
            lambda,
            np: 2 * n,
        })
    }

    pub fn split(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let mut p = DVector::zeros(self.np + 1);
        p[0] = 1.0;
        p.rows_mut(1, self.np).copy_from(&z.rows(0, self.np));
        (p, z.rows(self.np, z.len() - self.np).into_owned())
    }

    pub fn p_values(&self, z: &DVector<f64>) -> Option<DVector<f64>> {
        let (p, _) = self.split(z);
        let pv = self.trig.eval(&p);
        pv.iter().all(|&v| v > 0.0).then_some(pv)
    }
}

impl Objective for BlockJoint {
    fn value(&self, z: &DVector<f64>) -> Option<f64> {
        let pv = self.p_values(z)?;
        let (_, x) = self.split(z);
        let pt = block_point(&self.basis, &x)?;
        let m = self.basis.m as f64;
        let len = pv.len() as f64;
        let integral = pv
            .iter()
            .zip(&pt.logdets)
            .map(|(&p, &ld)| m * p * p.ln() - p * ld - self.lambda * p.ln())
            .sum::<f64>()
            / len;
        Some(self.cvec.dot(&x) - self.gvec.dot(&z.rows(0, self.np)) + integral)
    }

    fn derivatives(&self, z: &DVector<f64>) -> Option<Derivatives> {
        let value = self.value(z)?;
        let pv = self.p_values(z)?;
        let (_, x) = self.split(z);
        let pt = block_point(&self.basis, &x)?;
        let m = self.basis.m as f64;
        let np = self.np;
        let dim = z.len();
        let len = pv.len() as f64;

        // p block
        let lp = DVector::from_iterator(
            pv.len(),
            pv.iter()
                .zip(&pt.logdets)
                .map(|(&p, &ld)| m * p.ln() + m - ld - self.lambda / p),
        );
        let gp_full = self.trig.moments(&lp);
        let mut gradient = DVector::zeros(dim);
        gradient
            .rows_mut(0, np)
            .copy_from(&(gp_full.rows(1, np) - &self.gvec));
        let phi = weighted_moments(&self.basis, &pt, pv.as_slice());
        gradient
            .rows_mut(np, dim - np)
            .copy_from(&(&self.cvec - self.basis.pair(&phi)));

        let mut hessian = DMatrix::zeros(dim, dim);
        let wpp = pv.map(|p| m / p + self.lambda / (p * p));
        let hpp_full = self.trig.gram(&wpp);
        hessian
            .view_mut((0, 0), (np, np))
            .copy_from(&hpp_full.view((1, 1), (np, np)));
        let hqq = block_hessian(&self.basis, &pt, pv.as_slice());
        hessian
            .view_mut((np, np), (dim - np, dim - np))
            .copy_from(&hqq);
        // cross: -(1/2N) sum_j d_a(zeta_j) tr(Q_j^-1 B_b(zeta_j))
        let d = self.trig.matrix();
        for (s, inv) in pt.inverses.iter().enumerate() {
            let bs = self.basis.basis_at(s);
            for (b, bb) in bs.iter().enumerate() {
                let t = (inv * bb).trace().re / len;
                for a in 0..np {
                    let v = -d[(s, a + 1)] * t;
                    hessian[(a, np + b)] += v;
                    hessian[(np + b, a)] += v;
                }
            }
        }
        Some(Derivatives {
            value,
            gradient,
            hessian,
        })
    }

    fn margin(&self, z: &DVector<f64>) -> f64 {
        let (p, x) = self.split(z);
        let pmin = self.trig.eval(&p).min();
        pmin.min(block_margin(&self.basis, &x))
    }
}

/// Output of [`solve_joint_block`].
#[derive(Debug, Clone)]
pub struct BlockJointSolution {
    pub p: PseudoPolynomial,
    pub q: MatrixPseudoPolynomial,
    pub lambda: f64,
    pub epsilon: Vec<Complex64>,
    pub phi: Vec<CMat>,
    pub covariance_residual: f64,
    /// Largest `|cepstrum_k(log det Phi) - gamma_k - eps_k|`.
    pub cepstral_residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Cepstral coefficients of `log det Phi` for `k = 1..n`.
pub fn log_det_cepstrum(circle: &DiscreteCircle, phi: &[CMat], n: usize) -> Result<Vec<Complex64>> {
    let logdet: Vec<f64> = phi
        .iter()
        .enumerate()
        .map(|(s, v)| {
            linalg::hpd_inverse_logdet(v, 0.0)
                .map(|(_, ld)| ld)
                .ok_or(Error::NotPositiveDefinite {
                    index: circle.index(s),
                    min_eig: linalg::min_eigenvalue(v),
                })
        })
        .collect::<Result<_>>()?;
    let mut out = crate::harmonics::moments(circle, &logdet, n)?;
    out.remove(0);
    Ok(out)
}

/// Solves the regularized joint problem for block data.
pub fn solve_joint_block(
    c: &CovarianceData,
    gamma: &CepstralData,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<BlockJointSolution> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization lambda must be positive, got {lambda}"
        )));
    }
    cfg.validate()?;
    if !toeplitz_positive(c) {
        return Err(Error::Infeasible {
            reason: "block Toeplitz matrix is not positive definite".into(),
            direction: Vec::new(),
        });
    }
    let circle = c.circle();
    let n = c.degree();
    let obj = BlockJoint::new(c, gamma, lambda)?;
    let c0_inv = c.lags()[0]
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { index: 0 })?;
    let q0 = MatrixPseudoPolynomial::new(vec![c0_inv])?;
    let mut z0 = DVector::zeros(obj.np + obj.basis.dim());
    z0.rows_mut(obj.np, obj.basis.dim())
        .copy_from(&block_x(c, &q0)?);
    let scale = linalg::max_abs(&c.lags()[0]).max(1.0);
    let out = crate::cepstral::minimize_joint(&obj, z0, obj.np, cfg, scale);
    map_status(out.status, &out.x, out.iterations, out.gradient_norm)?;

    let (pvec, x) = obj.split(&out.x);
    let p = PseudoPolynomial::from_real_params(pvec.as_slice())?;
    let q = obj.basis.poly(&x);
    let phi = block_spectrum(&circle, &p, &q)?;
    let epsilon = epsilon_adjustment(&circle, &p, lambda, n)?;
    let cep = log_det_cepstrum(&circle, &phi, n)?;
    let cepstral_residual = cep
        .iter()
        .zip(gamma.coeffs())
        .zip(&epsilon)
        .map(|((a, g), e)| (a - g - e).norm())
        .fold(0.0, f64::max);
    let covariance_residual = block_moments(&circle, &phi, n)?
        .iter()
        .zip(c.lags())
        .map(|(a, b)| linalg::max_abs(&(a - b)))
        .fold(0.0, f64::max);
    Ok(BlockJointSolution {
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
