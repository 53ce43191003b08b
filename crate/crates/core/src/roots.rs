//! Polynomial roots by simultaneous Aberth-Ehrlich iteration.

use num_complex::Complex64;

/// `sum_j coeffs[j] z^j` and its derivative.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `sum_j coeffs[j] z^j` (ascending powers). Leading zeros are trimmed.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mono: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    // Initial points on a circle of the Cauchy-bound radius, rotated off symmetry axes.
    let radius = mono[..deg]
        .iter()
        .map(|c| c.norm().powf(1.0 / deg as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, t)
        })
        .collect();

    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner(&mono, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 {
                ratio
            } else {
                ratio / denom
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    // One Newton polish per root.
    for r in z.iter_mut() {
        let (p, dp) = horner(&mono, *r);
        if dp.norm() > 0.0 {
            let next = *r - p / dp;
            if horner(&mono, next).0.norm() <= p.norm() {
                *r = next;
            }
        }
    }
    z
}

/// Expands `prod_i (z - r_i)` into ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] -= cj * r;
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic() {
        // z^2 - 3z + 2
        let mut r = polynomial_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn round_trip_through_expansion() {
        let want = [
            c(0.5, 0.2),
            c(-0.3, 0.7),
            c(2.0, -1.0),
            c(-1.5, 0.0),
            c(0.1, -0.1),
        ];
        let coeffs = poly_from_roots(&want);
        let got = polynomial_roots(&coeffs);
        for w in want {
            let d = got
                .iter()
                .map(|g| (g - w).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12, "{w}: {d}");
        }
    }

    #[test]
    fn trims_leading_zeros() {
        let r = polynomial_roots(&[c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(polynomial_roots(&[c(3.0, 0.0)]).is_empty());
    }
}
