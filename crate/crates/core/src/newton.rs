//! Damped Newton iteration shared by the dual solvers.
//!
//! Each dual functional is a smooth strictly convex function on an open cone
//! in a real parameter space. The log terms act as a barrier: the line search
//! simply rejects any trial point where the objective is undefined.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg;

/// Newton controls shared by all dual solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when the gradient infinity norm drops below this times `c_0`.
    pub gradient_tol: f64,
    pub backtrack: f64,
    pub armijo: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-10,
            backtrack: 0.5,
            armijo: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.gradient_tol > 0.0) || !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(crate::Error::InvalidParameter(
                "tolerances must be positive and the Armijo constant below 1/2".into(),
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(crate::Error::InvalidParameter(
                "backtracking factor must lie in (0, 1)".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(crate::Error::InvalidParameter(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) struct Derivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

pub(crate) trait Objective {
    /// `None` outside the domain (a grid value left the cone).
    fn value(&self, x: &DVector<f64>) -> Option<f64>;

    fn derivatives(&self, x: &DVector<f64>) -> Option<Derivatives>;

    /// Smallest normalized margin to the cone boundary, e.g. `min_j Q(zeta_j) / q_0`.
    fn margin(&self, x: &DVector<f64>) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Status {
    Converged,
    /// Iterates ran off to infinity: the objective is unbounded below.
    Unbounded {
        direction: Vec<f64>,
    },
    /// Iterates approached the cone boundary while the decrement stalled.
    Boundary,
    IterationCap,
    /// The Newton system could not be solved or no step was accepted.
    Stalled,
}

pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub status: Status,
    pub hessian_condition: f64,
}

/// Margin below which the iterate counts as touching the boundary.
pub(crate) const BOUNDARY_MARGIN: f64 = 1e-10;
/// Consecutive stalled iterations near the boundary before giving up.
pub(crate) const BOUNDARY_STALL: usize = 5;

pub(crate) fn minimize(
    obj: &dyn Objective,
    x0: DVector<f64>,
    cfg: &SolverConfig,
    gradient_scale: f64,
) -> Outcome {
    let tol = cfg.gradient_tol * gradient_scale.abs().max(f64::MIN_POSITIVE);
    let x0_norm = x0.norm().max(1.0);
    let mut x = x0;
    let mut history = Vec::new();
    let mut stall = 0usize;

    let mut d = match obj.derivatives(&x) {
        Some(d) => d,
        None => {
            return Outcome {
                value: f64::INFINITY,
                gradient_norm: f64::INFINITY,
                iterations: 0,
                history,
                status: Status::Stalled,
                hessian_condition: f64::NAN,
                x,
            }
        }
    };
    history.push(d.value);

    for it in 0..cfg.max_iterations {
        let gnorm = d.gradient.amax();
        if gnorm <= tol {
            return Outcome {
                value: d.value,
                gradient_norm: gnorm,
                iterations: it,
                history,
                status: Status::Converged,
                hessian_condition: f64::NAN,
                x,
            };
        }
        let step = match linalg::spd_solve(&d.hessian, &(-&d.gradient)) {
            Some(s) => s,
            None => {
                return Outcome {
                    value: d.value,
                    gradient_norm: gnorm,
                    iterations: it,
                    history,
                    status: Status::Stalled,
                    hessian_condition: linalg::condition_number(&d.hessian),
                    x,
                }
            }
        };
        let slope = d.gradient.dot(&step);
        let decrement = -slope;

        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-18 {
            let trial = &x + &step * t;
            if let Some(v) = obj.value(&trial) {
                let sufficient = v <= d.value + cfg.armijo * t * slope;
                // Near the optimum the decrease is below rounding; accept the
                // full step if it reduces the gradient instead.
                let noise_level = decrement < 1e-12 * d.value.abs().max(1.0);
                if sufficient
                    || (t == 1.0 && noise_level && v <= d.value + 1e-14 * d.value.abs().max(1.0))
                {
                    if let Some(nd) = obj.derivatives(&trial) {
                        if sufficient || nd.gradient.amax() < gnorm {
                            accepted = Some((trial, nd));
                            break;
                        }
                    }
                }
            }
            t *= cfg.backtrack;
        }
        let Some((nx, nd)) = accepted else {
            let status = if obj.margin(&x) < BOUNDARY_MARGIN {
                Status::Boundary
            } else {
                Status::Stalled
            };
            return Outcome {
                value: d.value,
                gradient_norm: gnorm,
                iterations: it,
                history,
                status,
                hessian_condition: linalg::condition_number(&d.hessian),
                x,
            };
        };

        let progress = d.value - nd.value;
        x = nx;
        d = nd;
        history.push(d.value);

        let xn = x.norm();
        if !xn.is_finite() || xn > 1e10 * x0_norm || d.value < -1e12 * gradient_scale.abs().max(1.0)
        {
            let direction = (&x / xn).iter().cloned().collect();
            return Outcome {
                value: d.value,
                gradient_norm: d.gradient.amax(),
                iterations: it + 1,
                history,
                status: Status::Unbounded { direction },
                hessian_condition: f64::NAN,
                x,
            };
        }

        if obj.margin(&x) < BOUNDARY_MARGIN && progress <= 1e-12 * d.value.abs().max(1.0) {
            stall += 1;
            if stall >= BOUNDARY_STALL {
                return Outcome {
                    value: d.value,
                    gradient_norm: d.gradient.amax(),
                    iterations: it + 1,
                    history,
                    status: Status::Boundary,
                    hessian_condition: linalg::condition_number(&d.hessian),
                    x,
                };
            }
        } else {
            stall = 0;
        }
    }

    let gnorm = d.gradient.amax();
    let status = if gnorm <= tol {
        Status::Converged
    } else {
        Status::IterationCap
    };
    Outcome {
        value: d.value,
        gradient_norm: gnorm,
        iterations: cfg.max_iterations,
        history,
        status,
        hessian_condition: linalg::condition_number(&d.hessian),
        x,
    }
}
