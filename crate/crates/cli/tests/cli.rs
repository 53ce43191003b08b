//! End-to-end runs of the `circarma` binary.

use std::process::{Command, Output};

use circarma::harmonics::moments_of;
use circarma::json::complex_pair;
use circarma::{grid, DiscreteSpectrum, PseudoPolynomial};
use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circarma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circarma"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn poly_json(p: &PseudoPolynomial) -> Value {
    serde_json::to_value(p).unwrap()
}

/// Lags `c_0..c_n` of `P/Q` on the grid, as JSON covariance data.
fn covariance_json(half: usize, p: &PseudoPolynomial, q: &PseudoPolynomial, n: usize) -> Value {
    let phi = DiscreteSpectrum::rational(&grid(half).unwrap(), p, q).unwrap();
    let lags: Vec<[f64; 2]> = moments_of(&phi, n)
        .unwrap()
        .into_iter()
        .map(complex_pair)
        .collect();
    json!({ "m": 1, "N": half, "lags": lags })
}

fn coeffs(v: &Value) -> Vec<(f64, f64)> {
    v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn check_white_noise_is_feasible() {
    let out = run(&["check", "--input", r#"{"m":1,"N":8,"lags":[1.0,0.0,0.0]}"#]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["toeplitz_pd"], true);
    assert_eq!(v["membership"], "Feasible");
}

#[test]
fn check_singular_toeplitz_is_infeasible() {
    let out = run(&["check", "--input", r#"{"m":1,"N":8,"lags":[1.0,1.0]}"#]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["toeplitz_pd"], false);
    assert_eq!(v["membership"], "Infeasible");
}

#[test]
fn check_full_sequence_wraparound() {
    // period 4 requires c_3 = c_1
    let bad = run(&[
        "check",
        "-i",
        r#"{"full":true,"N":2,"lags":[2.0,0.5,0.1,0.3]}"#,
    ]);
    assert_eq!(code(&bad), 1);
    assert_eq!(stdout_json(&bad)["valid"], false);
    let good = run(&[
        "check",
        "-i",
        r#"{"full":true,"N":2,"lags":[2.0,0.5,0.1,0.5]}"#,
    ]);
    assert_eq!(code(&good), 0);
    assert_eq!(stdout_json(&good)["valid"], true);
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(code(&run(&["check", "-i", "{\"m\":1,"])), 2);
    assert_eq!(
        code(&run(&["check", "-i", r#"{"m":2,"N":4,"lags":[1.0]}"#])),
        2
    );
    assert_eq!(code(&run(&["solve", "-i", "/nonexistent/input.json"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["check", "--format", "xml"])), 2);
}

#[test]
fn solve_recovers_seeded_denominator() {
    let p = PseudoPolynomial::real(&[1.0, 0.2, -0.1]).unwrap();
    let q = PseudoPolynomial::new(vec![
        circarma::Complex64::new(1.3, 0.0),
        circarma::Complex64::new(-0.4, 0.1),
        circarma::Complex64::new(0.15, -0.05),
    ])
    .unwrap();
    let input = json!({ "covariance": covariance_json(16, &p, &q, 2), "P": poly_json(&p) });
    let out = run(&["solve", "--reproducible", "-i", &input.to_string()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let got = coeffs(&v["q"]);
    for (k, z) in q.coeffs().iter().enumerate() {
        assert!((got[k].0 - z.re).abs() < 1e-8 && (got[k].1 - z.im).abs() < 1e-8);
    }
    assert!(v["moment_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["spectrum"]["phi"].as_array().unwrap().len(), 32);
}

#[test]
fn solve_degree_zero_is_constant() {
    let out = run(&[
        "solve",
        "-i",
        r#"{"covariance":{"m":1,"N":4,"lags":[2.0]}}"#,
        "--reproducible",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(coeffs(&v["q"]), vec![(0.5, 0.0)]);
    assert_eq!(v["iterations"], 0);
}

#[test]
fn solve_infeasible_reports_boundary_direction() {
    // |c_1| = 0.9 at angle pi/4 exceeds what 4 grid points can produce
    let input = r#"{"covariance":{"m":1,"N":2,"lags":[[1.0,0.0],[0.6364,0.6364]]}}"#;
    let out = run(&["solve", "-i", input]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["error"], "infeasible");
    assert!(!v["boundary_direction"].as_array().unwrap().is_empty());
}

#[test]
fn solve_csv_has_spectrum_columns() {
    let out = run(&[
        "solve",
        "-f",
        "csv",
        "-i",
        r#"{"covariance":{"m":1,"N":4,"lags":[1.0,0.3]}}"#,
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,theta,phi,p,q"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].starts_with("-3,"));
    // 17 significant digits
    let phi = rows[0].split(',').nth(2).unwrap();
    assert_eq!(
        phi.split('e').next().unwrap().replace(['.', '-'], "").len(),
        17
    );
}

#[test]
fn reproducible_output_is_byte_identical() {
    let input = r#"{"Q":{"n":1,"coeffs":[[1.5,0],[-0.5,0]]},"N":8,"realizations":3}"#;
    let a = run(&["simulate", "--seed", "11", "--reproducible", "-i", input]);
    let b = run(&["simulate", "--seed", "11", "--reproducible", "-i", input]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_json(&a).get("timestamp").is_none());
    let c = run(&["simulate", "--seed", "12", "--reproducible", "-i", input]);
    assert_ne!(a.stdout, c.stdout);
    let stamped = run(&["simulate", "--seed", "11", "-i", input]);
    assert!(stdout_json(&stamped).get("timestamp").is_some());
}

#[test]
fn simulate_csv_columns() {
    let input = r#"{"Q":{"n":1,"coeffs":[[1.5,0],[-0.5,0]]},"N":4,"realizations":2}"#;
    let out = run(&["simulate", "-f", "csv", "-i", input]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,realization,value");
    assert_eq!(lines.len(), 1 + 2 * 8);
    assert!(lines[1].starts_with("-3,0,"));
    assert!(lines[16].starts_with("4,1,"));
}

#[test]
fn cepstral_solve_reports_epsilon() {
    let input = r#"{"covariance":{"m":1,"N":8,"lags":[1.0,0.3]},"gamma":[0.2],"lambda":0.5}"#;
    let out = run(&["cepstral-solve", "--reproducible", "-i", input]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["lambda"], 0.5);
    assert_eq!(v["epsilon"].as_array().unwrap().len(), 1);
    assert!(v["covariance_residual"].as_f64().unwrap() < 1e-8);
    // the flag overrides the input value
    let out = run(&[
        "cepstral-solve",
        "--lambda",
        "0.01",
        "--reproducible",
        "-i",
        input,
    ]);
    assert_eq!(stdout_json(&out)["lambda"], 0.01);
    let out = run(&["cepstral-solve", "--lambda", "-1", "-i", input]);
    assert_eq!(code(&out), 2);
}

#[test]
fn block_solve_and_extend() {
    let input = json!({
        "covariance": {
            "m": 2, "N": 4,
            "lags": [
                [[1, 0], [0.2, 0], [0.2, 0], [1, 0]],
                [[0.3, 0], [0, 0], [0, 0], [0.1, 0]],
            ],
        },
    })
    .to_string();
    let out = run(&["block-solve", "--reproducible", "-i", &input]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["m"], 2);
    assert!(v["moment_residual"].as_f64().unwrap() < 1e-8);
    let out = run(&["extend", "--reproducible", "-i", &input]);
    let v = stdout_json(&out);
    assert_eq!(v["lags"].as_array().unwrap().len(), 8);
    assert!(v["wraparound_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn factor_emits_three_models() {
    let input =
        r#"{"P":{"n":1,"coeffs":[[1,0],[0.3,0]]},"Q":{"n":1,"coeffs":[[1.5,0],[-0.5,0]]},"N":8}"#;
    let out = run(&["factor", "--reproducible", "-i", input]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let kinds: Vec<&str> = v["models"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["kind"].as_str().unwrap())
        .collect();
    assert_eq!(
        kinds,
        ["bilateral", "unilateral-forward", "unilateral-backward"]
    );
    assert_eq!(v["models"][1]["a"][0], json!([1.0, 0.0]));
    assert!(v["whitening"]["residual"].as_f64().unwrap() < 1e-12);
    // Q vanishing on the circle has no outer factor
    let on_circle = r#"{"Q":{"n":1,"coeffs":[[2,0],[-1,0]]},"N":8}"#;
    let out = run(&["factor", "-i", on_circle]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sweep_rows_are_ordered_and_decreasing() {
    // degree-4 AR truth with poles of modulus 0.9 and 0.8
    let input = json!({
        "truth": { "Q": serde_json::to_value(ar_truth()).unwrap() },
        "N": [64, 16, 32, 8],
        "n": [4],
    })
    .to_string();
    let out = run(&["sweep", "-f", "csv", "-i", &input]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,n,error,iterations");
    let rows: Vec<(usize, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(
        rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        [8, 16, 32, 64]
    );
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1), "{rows:?}");
}

#[test]
fn sweep_white_noise_has_no_error() {
    let input = r#"{"truth":{"Q":{"n":0,"coeffs":[[1,0]]}},"N":[8,16],"n":[1,2],"model":"arma","lambda":0.1}"#;
    let out = run(&["sweep", "--reproducible", "-i", input]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["error"].as_f64().unwrap() < 1e-10));
    let empty = run(&[
        "sweep",
        "-i",
        r#"{"truth":{"Q":{"n":0,"coeffs":[[1,0]]}},"N":[],"n":[1]}"#,
    ]);
    assert_eq!(code(&empty), 2);
}

fn ar_truth() -> PseudoPolynomial {
    // |a(z)|^2 for a(z) = (1 - 0.9 e^{i0.5} z)(1 - 0.9 e^{-i0.5} z)(1 - 0.8 e^{i2} z)(1 - 0.8 e^{-i2} z)
    let roots = [
        circarma::Complex64::from_polar(0.9, 0.5),
        circarma::Complex64::from_polar(0.9, -0.5),
        circarma::Complex64::from_polar(0.8, 2.0),
        circarma::Complex64::from_polar(0.8, -2.0),
    ];
    let a = circarma::roots::poly_from_roots(&roots);
    let n = a.len() - 1;
    let coeffs = (0..=n)
        .map(|k| (k..=n).map(|j| a[j] * a[j - k].conj()).sum())
        .collect();
    PseudoPolynomial::new(coeffs).unwrap()
}

#[test]
fn dense_cap_is_honoured() {
    let input = r#"{"m":1,"N":8,"lags":[1.0,0.2]}"#;
    let ok = run_env(
        &["check", "--dense", "-i", input],
        "CIRCARMA_DENSE_CAP",
        "64",
    );
    assert_eq!(code(&ok), 0);
    assert_eq!(
        stdout_json(&ok)["banded_circulant"]
            .as_array()
            .unwrap()
            .len(),
        16
    );
    let capped = run_env(
        &["check", "--dense", "-i", input],
        "CIRCARMA_DENSE_CAP",
        "8",
    );
    assert_eq!(code(&capped), 1);
    assert_eq!(stdout_json(&capped)["error"], "dense-cap-exceeded");
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sol.json");
    let out = run(&[
        "solve",
        "--reproducible",
        "-i",
        r#"{"covariance":{"m":1,"N":4,"lags":[1.0,0.3]}}"#,
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["N"], 4);
}
