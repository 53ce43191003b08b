//! Rational covariance extension on the discrete unit circle.
//!
//! A stationary process of period `2N` has a circulant covariance whose
//! spectrum lives on the `2N`-th roots of unity. Given the first `n + 1`
//! lags, this crate finds the unique rational spectrum `P/Q` of degree `n`
//! that matches them for any prescribed positive numerator `P`, by convex
//! duality, and turns the result into bilateral and unilateral ARMA models.
//!
//! Modules:
//! - [`harmonics`]: the grid, pseudo-polynomials, discrete moments.
//! - [`circulant`]: (block-)circulant matrices via their symbols.
//! - [`cones`]: covariance data, feasibility, full periodic sequences.
//! - [`scalar`]: the dual solver for scalar data.
//! - [`realization`]: extension, ARMA forms, factorization, simulation.
//! - [`cepstral`]: joint covariance and cepstral matching.
//! - [`multivar`]: block data with a scalar numerator.
//!
//! ```
//! use circarma::{solve_dual, CovarianceData, PseudoPolynomial, SolverConfig};
//! use circarma::realization::unilateral_arma;
//!
//! // three lags of a process with period 2N = 32
//! let c = CovarianceData::scalar_real(16, &[1.0, 0.5, 0.1]).unwrap();
//! let p = PseudoPolynomial::real(&[1.0, 0.2, 0.0]).unwrap();
//! let sol = solve_dual(&c, &p, &SolverConfig::default()).unwrap();
//! assert!(sol.moment_residual(&c.scalar_lags().unwrap()) < 1e-8);
//! let (forward, _backward) = unilateral_arma(&c.circle(), &sol.p, &sol.q).unwrap();
//! assert_eq!(forward.a[0].re, 1.0);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cepstral;
pub mod circulant;
pub mod cones;
pub mod error;
pub mod harmonics;
pub mod json;
pub mod linalg;
pub mod multivar;
pub mod newton;
pub mod realization;
pub mod roots;
pub mod scalar;

pub use cepstral::{solve_joint, CepstralData, JointSolution};
pub use circulant::CirculantMatrix;
pub use cones::{certify_membership, CovarianceData, FullPeriodicSequence, Membership};
pub use error::{Error, Result};
pub use harmonics::{grid, DiscreteCircle, DiscreteSpectrum, PseudoPolynomial};
pub use linalg::CMat;
pub use multivar::{solve_dual_block, MatrixPseudoPolynomial};
pub use newton::SolverConfig;
pub use realization::{ArmaModel, ModelKind, WhiteningFactor};
pub use scalar::{solve_dual, DualSolution};

pub use num_complex::Complex64;
