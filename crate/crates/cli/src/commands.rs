//! Subcommand implementations. Each returns a JSON document and, when the
//! command has a tabular form, the CSV rendering.

use circarma::cepstral::{cepstral_moments, solve_joint, solve_joint_unregularized};
use circarma::cones::{toeplitz_positive, validate_full_sequence, FullPeriodicSequence};
use circarma::harmonics::{eval_symbol, moments_of};
use circarma::json::{complex_pair, EntryJson};
use circarma::multivar::{bilateral_matrix_arma, block_extension_and_sigma};
use circarma::realization::{
    bilateral_arma, extend_covariances, simulate, unilateral_arma, whitening_rational,
};
use circarma::{
    certify_membership, grid, solve_dual, solve_dual_block, CMat, CepstralData, Complex64,
    CovarianceData, DiscreteCircle, DiscreteSpectrum, Membership, PseudoPolynomial, SolverConfig,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io::{field, opt_field, Cell, Failure, Outcome, Table};

/// Default regularization weight, relative to `c_0`.
const DEFAULT_LAMBDA: f64 = 1e-2;

/// Options shared by all subcommands.
pub struct Ctx {
    pub seed: u64,
    pub lambda: Option<f64>,
    pub dense: bool,
}

pub struct Rendered {
    pub json: Value,
    pub csv: Option<String>,
}

fn config(v: &Value) -> Outcome<SolverConfig> {
    let cfg: SolverConfig = opt_field(v, "config")?.unwrap_or_default();
    cfg.validate()?;
    Ok(cfg)
}

/// Covariance data with an optional top-level `N` overriding its own.
fn covariance(v: &Value) -> Outcome<CovarianceData> {
    let c: CovarianceData = field(v, "covariance")?;
    match opt_field::<usize>(v, "N")? {
        Some(n) => Ok(c.with_half_period(n)?),
        None => Ok(c),
    }
}

fn numerator(v: &Value) -> Outcome<PseudoPolynomial> {
    Ok(opt_field(v, "P")?.unwrap_or_else(PseudoPolynomial::one))
}

fn block_json(x: &CMat) -> Value {
    serde_json::to_value(EntryJson::from_block(x)).expect("entries serialize")
}

fn complex_list(zs: &[Complex64]) -> Value {
    json!(zs.iter().map(|&z| complex_pair(z)).collect::<Vec<_>>())
}

fn spectrum_table(circle: &DiscreteCircle, phi: &[f64], p: &[f64], q: &[f64]) -> String {
    let mut t = Table::new(&["k", "theta", "phi", "p", "q"]);
    for s in 0..circle.len() {
        t.row(&[
            Cell::Int(circle.index(s)),
            Cell::Num(circle.angle(s)),
            Cell::Num(phi[s]),
            Cell::Num(p[s]),
            Cell::Num(q[s]),
        ]);
    }
    t.finish()
}

fn spectrum_json(circle: &DiscreteCircle, phi: &[f64], p: &[f64], q: &[f64]) -> Value {
    json!({
        "k": circle.indices().collect::<Vec<_>>(),
        "theta": (0..circle.len()).map(|s| circle.angle(s)).collect::<Vec<_>>(),
        "phi": phi,
        "p": p,
        "q": q,
    })
}

pub fn check(v: &Value, ctx: &Ctx) -> Outcome<Rendered> {
    if v.get("full").and_then(Value::as_bool) == Some(true) {
        return check_full(v);
    }
    let c: CovarianceData = serde_json::from_value(v.clone())
        .map_err(|e| Failure::usage(format!("covariance data: {e}")))?;
    let toeplitz_pd = toeplitz_positive(&c);
    let membership = certify_membership(&c)?;
    let mut report = json!({ "toeplitz_pd": toeplitz_pd });
    match &membership {
        Membership::Feasible(_) => {
            report["membership"] = json!("Feasible");
            report["diagnostic"] = json!("maximum-entropy dual has an interior minimizer");
        }
        Membership::Infeasible { reason, direction } => {
            report["membership"] = json!("Infeasible");
            report["diagnostic"] = json!(reason);
            report["boundary_direction"] = json!(direction);
        }
    }
    if ctx.dense {
        let dense = c.banded_circulant()?.dense()?;
        let rows: Vec<Vec<[f64; 2]>> = (0..dense.nrows())
            .map(|i| {
                (0..dense.ncols())
                    .map(|j| complex_pair(dense[(i, j)]))
                    .collect()
            })
            .collect();
        report["banded_circulant"] = json!(rows);
    }
    if !membership.is_feasible() {
        return Err(Failure::Domain {
            message: "covariance data is not in the discrete cone".into(),
            payload: report,
        });
    }
    Ok(Rendered {
        json: report,
        csv: None,
    })
}

/// Validates a full sequence `C_0..C_{2N-1}`.
fn check_full(v: &Value) -> Outcome<Rendered> {
    let m: usize = opt_field(v, "m")?.unwrap_or(1);
    let half: usize = field(v, "N")?;
    let entries: Vec<EntryJson> = field(v, "lags")?;
    let lags = entries
        .iter()
        .map(|e| e.to_block(m))
        .collect::<circarma::Result<Vec<_>>>()?;
    let seq = FullPeriodicSequence::from_full(half, lags)?;
    let r = validate_full_sequence(&seq);
    let report = json!({
        "wraparound": r.wraparound,
        "min_symbol_eigenvalue": r.min_symbol_eigenvalue,
        "valid": r.valid,
    });
    if !r.valid {
        return Err(Failure::Domain {
            message: "full sequence is not a valid periodic covariance".into(),
            payload: report,
        });
    }
    Ok(Rendered {
        json: report,
        csv: None,
    })
}

pub fn solve(v: &Value, _ctx: &Ctx) -> Outcome<Rendered> {
    let c = covariance(v)?;
    let p = numerator(v)?;
    let cfg = config(v)?;
    let sol = solve_dual(&c, &p, &cfg)?;
    let circle = c.circle();
    let lags = c.scalar_lags()?;
    let pv = eval_symbol(&sol.p, &circle)?;
    let qv = eval_symbol(&sol.q, &circle)?;
    let json = json!({
        "N": c.half_period(),
        "n": c.degree(),
        "q": sol.q,
        "p": sol.p,
        "gradient_norm": sol.gradient_norm,
        "iterations": sol.iterations,
        "primal_value": sol.primal_value,
        "dual_value": sol.dual_value,
        "moment_residual": sol.moment_residual(&lags),
        "spectrum": spectrum_json(&circle, sol.phi.values(), &pv, &qv),
    });
    let csv = spectrum_table(&circle, sol.phi.values(), &pv, &qv);
    Ok(Rendered {
        json,
        csv: Some(csv),
    })
}

/// `--lambda`, else the input's `lambda`, else `1e-2 c_0`.
fn resolve_lambda(v: &Value, ctx: &Ctx, c0: f64) -> Outcome<f64> {
    match ctx.lambda {
        Some(l) => Ok(l),
        None => Ok(opt_field(v, "lambda")?.unwrap_or(DEFAULT_LAMBDA * c0)),
    }
}

pub fn cepstral_solve(v: &Value, ctx: &Ctx) -> Outcome<Rendered> {
    let c = covariance(v)?;
    let gamma: CepstralData = field(v, "gamma")?;
    let lambda = resolve_lambda(v, ctx, c.lags()[0][(0, 0)].re)?;
    let cfg = config(v)?;
    let sol = if lambda == 0.0 {
        solve_joint_unregularized(&c, &gamma, &cfg)?
    } else {
        solve_joint(&c, &gamma, lambda, &cfg)?
    };
    let circle = c.circle();
    let pv = eval_symbol(&sol.p, &circle)?;
    let qv = eval_symbol(&sol.q, &circle)?;
    let json = json!({
        "N": c.half_period(),
        "n": c.degree(),
        "lambda": sol.lambda,
        "p": sol.p,
        "q": sol.q,
        "epsilon": complex_list(&sol.epsilon),
        "covariance_residual": sol.covariance_residual,
        "cepstral_residual": sol.cepstral_residual,
        "gradient_norm": sol.gradient_norm,
        "iterations": sol.iterations,
        "spectrum": spectrum_json(&circle, sol.phi.values(), &pv, &qv),
    });
    let csv = spectrum_table(&circle, sol.phi.values(), &pv, &qv);
    Ok(Rendered {
        json,
        csv: Some(csv),
    })
}

pub fn block_solve(v: &Value, _ctx: &Ctx) -> Outcome<Rendered> {
    let c = covariance(v)?;
    let p = numerator(v)?;
    let cfg = config(v)?;
    let sol = solve_dual_block(&c, &p, &cfg)?;
    let circle = c.circle();
    let model = bilateral_matrix_arma(&sol.p, &sol.q)?;
    let json = json!({
        "N": c.half_period(),
        "m": c.block(),
        "n": c.degree(),
        "q": sol.q,
        "p": sol.p,
        "gradient_norm": sol.gradient_norm,
        "iterations": sol.iterations,
        "dual_value": sol.dual_value,
        "moment_residual": sol.moment_residual(&c),
        "model": model,
        "spectrum": {
            "k": circle.indices().collect::<Vec<_>>(),
            "phi": sol.phi.iter().map(block_json).collect::<Vec<_>>(),
        },
    });
    let mut t = Table::new(&["k", "theta", "row", "col", "phi_re", "phi_im"]);
    for (s, value) in sol.phi.iter().enumerate() {
        for i in 0..value.nrows() {
            for j in 0..value.ncols() {
                t.row(&[
                    Cell::Int(circle.index(s)),
                    Cell::Num(circle.angle(s)),
                    Cell::Int(i as i64),
                    Cell::Int(j as i64),
                    Cell::Num(value[(i, j)].re),
                    Cell::Num(value[(i, j)].im),
                ]);
            }
        }
    }
    Ok(Rendered {
        json,
        csv: Some(t.finish()),
    })
}

/// A scalar rational model, given directly as `{P?, Q, N}` or solved from
/// `{covariance, P?, N?, config?}`.
fn scalar_model(v: &Value) -> Outcome<(DiscreteCircle, PseudoPolynomial, PseudoPolynomial)> {
    let p = numerator(v)?;
    if v.get("Q").is_some() {
        let q: PseudoPolynomial = field(v, "Q")?;
        let circle = grid(field(v, "N")?)?;
        return Ok((circle, p, q));
    }
    let c = covariance(v)?;
    let sol = solve_dual(&c, &p, &config(v)?)?;
    Ok((c.circle(), sol.p, sol.q))
}

pub fn extend(v: &Value, _ctx: &Ctx) -> Outcome<Rendered> {
    let is_block = v
        .get("covariance")
        .and_then(|c| c.get("m"))
        .and_then(Value::as_u64)
        .is_some_and(|m| m > 1);
    let seq = if is_block {
        let c = covariance(v)?;
        let p = numerator(v)?;
        let sol = solve_dual_block(&c, &p, &config(v)?)?;
        block_extension_and_sigma(&c.circle(), &sol.p, &sol.q)?.sequence
    } else {
        let (circle, p, q) = scalar_model(v)?;
        extend_covariances(&circle, &p, &q)?
    };
    let json = json!({
        "N": seq.half_period(),
        "m": seq.block(),
        "lags": seq.lags().iter().map(block_json).collect::<Vec<_>>(),
        "wraparound_residual": seq.wraparound_residual(),
    });
    let mut t = Table::new(&["k", "row", "col", "re", "im"]);
    for (k, c) in seq.lags().iter().enumerate() {
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                t.row(&[
                    Cell::Int(k as i64),
                    Cell::Int(i as i64),
                    Cell::Int(j as i64),
                    Cell::Num(c[(i, j)].re),
                    Cell::Num(c[(i, j)].im),
                ]);
            }
        }
    }
    Ok(Rendered {
        json,
        csv: Some(t.finish()),
    })
}

pub fn factor(v: &Value, _ctx: &Ctx) -> Outcome<Rendered> {
    let (circle, p, q) = scalar_model(v)?;
    let bilateral = bilateral_arma(&p, &q);
    let (forward, backward) = unilateral_arma(&circle, &p, &q)?;
    let phi = DiscreteSpectrum::rational(&circle, &p, &q)?;
    let w = whitening_rational(&circle, &p, &q)?;
    let models = [bilateral, forward, backward];
    let json = json!({
        "N": circle.half_period(),
        "models": models,
        "whitening": {
            "form": w.form,
            "residual": w.residual(&phi),
            "coefficients": complex_list(&w.coefficients()),
        },
    });
    let mut t = Table::new(&["kind", "j", "a_re", "a_im", "b_re", "b_im"]);
    for m in &models {
        let kind = serde_json::to_value(m.kind).expect("kind serializes");
        let kind = kind.as_str().unwrap_or_default().to_string();
        let offset = if m.a.len() > m.order + 1 {
            m.order as i64
        } else {
            0
        };
        for (j, (a, b)) in m.a.iter().zip(&m.b).enumerate() {
            t.row(&[
                Cell::Text(kind.clone()),
                Cell::Int(j as i64 - offset),
                Cell::Num(a.re),
                Cell::Num(a.im),
                Cell::Num(b.re),
                Cell::Num(b.im),
            ]);
        }
    }
    Ok(Rendered {
        json,
        csv: Some(t.finish()),
    })
}

pub fn simulate_cmd(v: &Value, ctx: &Ctx) -> Outcome<Rendered> {
    let (circle, p, q) = scalar_model(v)?;
    let realizations: usize = opt_field(v, "realizations")?.unwrap_or(1);
    if realizations == 0 {
        return Err(Failure::usage("`realizations` must be positive"));
    }
    let real: bool = opt_field(v, "real")?.unwrap_or(p.is_real() && q.is_real());
    let phi = DiscreteSpectrum::rational(&circle, &p, &q)?;
    let sim = simulate(&phi, realizations, ctx.seed, real)?;
    let half = circle.half_period() as i64;
    let times: Vec<i64> = (-half + 1..=half).collect();
    let json = if real {
        json!({
            "N": circle.half_period(),
            "seed": ctx.seed,
            "real": true,
            "t": times,
            "paths": sim.paths.iter().map(|p| p.iter().map(|z| z.re).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    } else {
        json!({
            "N": circle.half_period(),
            "seed": ctx.seed,
            "real": false,
            "t": times,
            "paths": sim.paths.iter().map(|p| complex_list(p)).collect::<Vec<_>>(),
        })
    };
    let header: &[&str] = if real {
        &["t", "realization", "value"]
    } else {
        &["t", "realization", "value", "value_im"]
    };
    let mut t = Table::new(header);
    for (r, path) in sim.paths.iter().enumerate() {
        for (&time, z) in times.iter().zip(path) {
            let mut row = vec![Cell::Int(time), Cell::Int(r as i64), Cell::Num(z.re)];
            if !real {
                row.push(Cell::Num(z.im));
            }
            t.row(&row);
        }
    }
    Ok(Rendered {
        json,
        csv: Some(t.finish()),
    })
}

#[derive(Clone, Copy, PartialEq)]
enum SweepModel {
    Ar,
    Arma,
}

struct SweepRow {
    half: usize,
    n: usize,
    error: f64,
    iterations: usize,
}

pub fn sweep(v: &Value, ctx: &Ctx) -> Outcome<Rendered> {
    let truth = v
        .get("truth")
        .ok_or_else(|| Failure::usage("missing field `truth`"))?;
    let p_true = numerator(truth)?;
    let q_true: PseudoPolynomial = field(truth, "Q")?;
    let mut halves: Vec<usize> = field(v, "N")?;
    let mut degrees: Vec<usize> = field(v, "n")?;
    if halves.is_empty() || degrees.is_empty() {
        return Err(Failure::usage("sweep lists `N` and `n` must be non-empty"));
    }
    halves.sort_unstable();
    halves.dedup();
    degrees.sort_unstable();
    degrees.dedup();
    let model = match opt_field::<String>(v, "model")?.as_deref() {
        None | Some("ar") => SweepModel::Ar,
        Some("arma") => SweepModel::Arma,
        Some(other) => return Err(Failure::usage(format!("unknown model `{other}`"))),
    };
    let cfg = config(v)?;
    let coarse_half: usize = opt_field(v, "coarse_N")?.unwrap_or(halves[0]);

    // Reference lags and cepstrum integrated on a fine grid.
    let fine_half = (4 * halves[halves.len() - 1]).max(4096);
    let fine = grid(fine_half)?;
    let fine_phi = DiscreteSpectrum::rational(&fine, &p_true, &q_true)?;
    let max_n = degrees[degrees.len() - 1];
    let lags = moments_of(&fine_phi, max_n)?;
    let gamma = cepstral_moments(&fine_phi, max_n)?;
    let lambda = resolve_lambda(v, ctx, lags[0].re)?;
    let coarse = grid(coarse_half)?;
    let truth_values = DiscreteSpectrum::rational(&coarse, &p_true, &q_true)?;

    let jobs: Vec<(usize, usize)> = halves
        .iter()
        .flat_map(|&h| degrees.iter().map(move |&n| (h, n)))
        .collect();
    // par_iter + collect preserves job order, so rows come out sorted by N.
    let rows: Vec<Outcome<SweepRow>> = jobs
        .par_iter()
        .map(|&(half, n)| -> Outcome<SweepRow> {
            let data = CovarianceData::scalar(half, &lags[..=n])?;
            let (p, q, iterations) = match model {
                SweepModel::Ar => {
                    let s = solve_dual(&data, &PseudoPolynomial::one(), &cfg)?;
                    (s.p, s.q, s.iterations)
                }
                SweepModel::Arma => {
                    let g = CepstralData::new(gamma.coeffs()[..n].to_vec())?;
                    let s = solve_joint(&data, &g, lambda, &cfg)?;
                    (s.p, s.q, s.iterations)
                }
            };
            // the fitted rational function is evaluated directly on the coarse grid
            let fit = DiscreteSpectrum::rational(&coarse, &p, &q)?;
            let error = fit
                .values()
                .iter()
                .zip(truth_values.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(SweepRow {
                half,
                n,
                error,
                iterations,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Outcome<Vec<_>>>()?;

    let json = json!({
        "model": if model == SweepModel::Ar { "ar" } else { "arma" },
        "lambda": if model == SweepModel::Arma { Some(lambda) } else { None },
        "coarse_N": coarse_half,
        "rows": rows.iter().map(|r| json!({
            "N": r.half, "n": r.n, "error": r.error, "iterations": r.iterations,
        })).collect::<Vec<_>>(),
    });
    let mut t = Table::new(&["N", "n", "error", "iterations"]);
    for r in &rows {
        t.row(&[
            Cell::Int(r.half as i64),
            Cell::Int(r.n as i64),
            Cell::Num(r.error),
            Cell::Int(r.iterations as i64),
        ]);
    }
    Ok(Rendered {
        json,
        csv: Some(t.finish()),
    })
}
