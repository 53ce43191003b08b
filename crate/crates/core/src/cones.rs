//! Covariance data, Toeplitz positivity and membership in the discrete
//! dual cone.
//!
//! Positivity of the (block) Toeplitz matrix is necessary but not sufficient
//! for the data to come from a 2N-periodic process. Membership is certified
//! constructively: the maximum-entropy dual problem has an interior
//! minimizer exactly when the data lie in the cone.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circulant::CirculantMatrix;
use crate::error::{Error, Result};
use crate::harmonics::{DiscreteCircle, PseudoPolynomial};
use crate::json::EntryJson;
use crate::linalg::{self, CMat};
use crate::multivar::{self, MatrixPseudoPolynomial};
use crate::newton::SolverConfig;
use crate::scalar;

/// Relative pivot threshold of the Toeplitz positivity test.
pub const TOEPLITZ_PIVOT: f64 = 1e-12;

/// Partial covariance sequence `C_0..C_n` of an m-variate process of period 2N.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceData {
    half_period: usize,
    lags: Vec<CMat>,
}

impl CovarianceData {
    pub fn new(half_period: usize, lags: Vec<CMat>) -> Result<Self> {
        if half_period == 0 {
            return Err(Error::ZeroHalfPeriod);
        }
        let Some(first) = lags.first() else {
            return Err(Error::InvalidParameter("at least C_0 is required".into()));
        };
        let m = first.nrows();
        if m == 0 || lags.iter().any(|c| c.nrows() != m || c.ncols() != m) {
            return Err(Error::DimensionMismatch(
                "lags must be square blocks of one size".into(),
            ));
        }
        if lags.len() > half_period {
            return Err(Error::DegreeTooLarge {
                degree: lags.len() - 1,
                half_period,
            });
        }
        if lags
            .iter()
            .any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
        {
            return Err(Error::InvalidParameter("non-finite lag".into()));
        }
        let mut lags = lags;
        lags[0] = linalg::hermitize(&lags[0], 0)?;
        Ok(Self { half_period, lags })
    }

    pub fn scalar(half_period: usize, lags: &[Complex64]) -> Result<Self> {
        Self::new(
            half_period,
            lags.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        )
    }

    pub fn scalar_real(half_period: usize, lags: &[f64]) -> Result<Self> {
        Self::new(
            half_period,
            lags.iter()
                .map(|&v| CMat::from_element(1, 1, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub fn half_period(&self) -> usize {
        self.half_period
    }

    pub fn circle(&self) -> DiscreteCircle {
        DiscreteCircle::new(self.half_period).expect("half-period validated")
    }

    /// Block size m.
    pub fn block(&self) -> usize {
        self.lags[0].nrows()
    }

    /// Number of lags minus one.
    pub fn degree(&self) -> usize {
        self.lags.len() - 1
    }

    pub fn lags(&self) -> &[CMat] {
        &self.lags
    }

    /// `c_0..c_n` for scalar data.
    pub fn scalar_lags(&self) -> Result<Vec<Complex64>> {
        if self.block() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected scalar data, got block size {}",
                self.block()
            )));
        }
        Ok(self.lags.iter().map(|c| c[(0, 0)]).collect())
    }

    /// Same lags on a different period.
    pub fn with_half_period(&self, half_period: usize) -> Result<Self> {
        Self::new(half_period, self.lags.clone())
    }

    /// Lag `C_k` for `|k| <= n`, with `C_{-k} = C_k^*`.
    pub fn lag(&self, k: i64) -> CMat {
        let idx = k.unsigned_abs() as usize;
        if idx >= self.lags.len() {
            let m = self.block();
            return CMat::zeros(m, m);
        }
        if k < 0 {
            self.lags[idx].adjoint()
        } else {
            self.lags[idx].clone()
        }
    }

    /// The `m(n+1)` square block Toeplitz matrix with block `(i, j) = C_{i-j}`.
    pub fn toeplitz(&self) -> CMat {
        let m = self.block();
        let size = self.lags.len();
        let mut t = CMat::zeros(m * size, m * size);
        for i in 0..size {
            for j in 0..size {
                let c = self.lag(i as i64 - j as i64);
                t.view_mut((i * m, j * m), (m, m)).copy_from(&c);
            }
        }
        t
    }

    /// Banded circulant `C` with symbol `sum_{|k|<=n} C_k zeta^{-k}`.
    pub fn banded_circulant(&self) -> Result<CirculantMatrix> {
        CirculantMatrix::from_banded(&self.circle(), &self.lags)
    }
}

#[derive(Serialize, Deserialize)]
struct CovarianceJson {
    m: usize,
    #[serde(rename = "N")]
    half_period: usize,
    lags: Vec<EntryJson>,
}

impl Serialize for CovarianceData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CovarianceJson {
            m: self.block(),
            half_period: self.half_period,
            lags: self.lags.iter().map(EntryJson::from_block).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CovarianceData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CovarianceJson::deserialize(deserializer)?;
        let lags = raw
            .lags
            .iter()
            .map(|e| e.to_block(raw.m))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        CovarianceData::new(raw.half_period, lags).map_err(serde::de::Error::custom)
    }
}

/// Full lag sequence `C_0..C_{2N-1}` of a process of period 2N.
#[derive(Debug, Clone, PartialEq)]
pub struct FullPeriodicSequence {
    half_period: usize,
    lags: Vec<CMat>,
}

/// Outcome of [`validate_full_sequence`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullSequenceReport {
    /// `C_{2N-k} = C_k^*` holds for every k.
    pub wraparound: bool,
    /// Smallest eigenvalue of the symbol over the grid.
    pub min_symbol_eigenvalue: f64,
    pub valid: bool,
}

impl FullPeriodicSequence {
    /// From `C_0..C_N`; the remaining lags follow from `C_{2N-k} = C_k^*`.
    pub fn from_half(half_period: usize, lags: Vec<CMat>) -> Result<Self> {
        if half_period == 0 {
            return Err(Error::ZeroHalfPeriod);
        }
        if lags.len() != half_period + 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected N+1 = {} lags, got {}",
                half_period + 1,
                lags.len()
            )));
        }
        let mut full = lags;
        for k in (1..half_period).rev() {
            full.push(full[k].adjoint());
        }
        Self::from_full(half_period, full)
    }

    /// From all `2N` lags `C_0..C_{2N-1}` as given, without symmetrizing.
    pub fn from_full(half_period: usize, lags: Vec<CMat>) -> Result<Self> {
        if half_period == 0 {
            return Err(Error::ZeroHalfPeriod);
        }
        if lags.len() != 2 * half_period {
            return Err(Error::DimensionMismatch(format!(
                "expected 2N = {} lags, got {}",
                2 * half_period,
                lags.len()
            )));
        }
        let m = lags[0].nrows();
        if m == 0 || lags.iter().any(|c| c.nrows() != m || c.ncols() != m) {
            return Err(Error::DimensionMismatch(
                "lags must be square blocks of one size".into(),
            ));
        }
        Ok(Self { half_period, lags })
    }

    pub fn scalar_half(half_period: usize, lags: &[Complex64]) -> Result<Self> {
        Self::from_half(
            half_period,
            lags.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        )
    }

    pub fn scalar_full(half_period: usize, lags: &[Complex64]) -> Result<Self> {
        Self::from_full(
            half_period,
            lags.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        )
    }

    pub fn half_period(&self) -> usize {
        self.half_period
    }

    pub fn block(&self) -> usize {
        self.lags[0].nrows()
    }

    /// `C_0..C_{2N-1}`.
    pub fn lags(&self) -> &[CMat] {
        &self.lags
    }

    /// Lag `C_k` for any integer k (indices taken modulo 2N).
    pub fn lag(&self, k: i64) -> &CMat {
        &self.lags[k.rem_euclid(2 * self.half_period as i64) as usize]
    }

    pub fn scalar_lags(&self) -> Vec<Complex64> {
        self.lags.iter().map(|c| c[(0, 0)]).collect()
    }

    /// Largest violation of `C_{2N-k} = C_k^*`.
    pub fn wraparound_residual(&self) -> f64 {
        let len = self.lags.len();
        (0..len)
            .map(|k| linalg::max_abs(&(&self.lags[(len - k) % len] - self.lags[k].adjoint())))
            .fold(0.0, f64::max)
    }

    /// The covariance matrix of one period, as a circulant.
    pub fn to_circulant(&self) -> Result<CirculantMatrix> {
        let circle = DiscreteCircle::new(self.half_period)?;
        let coeffs: Vec<CMat> = circle.indices().map(|k| self.lag(k).clone()).collect();
        CirculantMatrix::from_coefficients(&circle, &coeffs)
    }
}

/// True iff the (block) Toeplitz matrix of the data is positive definite.
pub fn toeplitz_positive(c: &CovarianceData) -> bool {
    linalg::is_positive_definite(&c.toeplitz(), TOEPLITZ_PIVOT)
}

/// Certificate returned by [`certify_membership`].
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// The maximum-entropy dual has an interior minimizer `Q`.
    Feasible(MaxEntropyDenominator),
    Infeasible {
        reason: String,
        /// Boundary direction in the real dual parametrization, when found.
        direction: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaxEntropyDenominator {
    Scalar(PseudoPolynomial),
    Block(MatrixPseudoPolynomial),
}

impl Membership {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Membership::Feasible(_))
    }
}

/// Certifies membership in the discrete dual cone by solving the
/// maximum-entropy dual (`P = 1`).
pub fn certify_membership(c: &CovarianceData) -> Result<Membership> {
    certify_membership_with(c, &SolverConfig::default())
}

pub fn certify_membership_with(c: &CovarianceData, cfg: &SolverConfig) -> Result<Membership> {
    if !toeplitz_positive(c) {
        return Ok(Membership::Infeasible {
            reason: "Toeplitz matrix is not positive definite".into(),
            direction: Vec::new(),
        });
    }
    let one = PseudoPolynomial::one();
    let outcome = if c.block() == 1 {
        scalar::solve_dual(c, &one, cfg).map(|s| MaxEntropyDenominator::Scalar(s.q))
    } else {
        multivar::solve_dual_block(c, &one, cfg).map(|s| MaxEntropyDenominator::Block(s.q))
    };
    match outcome {
        Ok(q) => Ok(Membership::Feasible(q)),
        Err(Error::Infeasible { reason, direction }) => {
            Ok(Membership::Infeasible { reason, direction })
        }
        Err(e) => Err(e),
    }
}

/// Checks wraparound symmetry and positivity of the symbol of the assembled
/// circulant covariance.
pub fn validate_full_sequence(seq: &FullPeriodicSequence) -> FullSequenceReport {
    let scale = linalg::max_abs(&seq.lags[0]).max(1.0);
    let wraparound = seq.wraparound_residual() <= 1e-12 * scale;
    let min_symbol_eigenvalue = match seq.to_circulant() {
        Ok(circ) => circ
            .values()
            .iter()
            .map(|v| {
                // Non-Hermitian values carry no spectrum; report the Hermitian part.
                let h = (v + v.adjoint()) * Complex64::new(0.5, 0.0);
                linalg::min_eigenvalue(&h)
            })
            .fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    };
    FullSequenceReport {
        wraparound,
        min_symbol_eigenvalue,
        valid: wraparound && min_symbol_eigenvalue > 0.0,
    }
}
