//! Chi-squared CDF via the regularized lower incomplete gamma function.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 10_000;

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        series(a, x)
    } else {
        1.0 - continued_fraction(a, x)
    }
}

fn series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() - x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper tail `Q(a, x)` by the modified Lentz continued fraction.
fn continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// `F_k(j)`: probability that a chi-squared variable with `k` degrees of
/// freedom is at most `j`.
pub fn chi_squared_cdf(j: f64, k: usize) -> Result<f64> {
    if !(j >= 0.0) {
        return Err(Error::Domain(format!("chi-squared statistic must be >= 0, got {j}")));
    }
    if k < 1 {
        return Err(Error::Domain("chi-squared needs at least one degree of freedom".into()));
    }
    if j.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_p(k as f64 / 2.0, j / 2.0).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integration of the chi-squared density after the
    /// substitution x = u², which makes the integrand smooth for every k.
    fn cdf_by_quadrature(j: f64, k: usize) -> f64 {
        let n = 20_000;
        let kf = k as f64;
        let norm = -(kf / 2.0) * 2f64.ln() - ln_gamma(kf / 2.0);
        // f(u²)·2u = 2·exp(norm)·u^(k−1)·exp(−u²/2)
        let density = |u: f64| {
            if u == 0.0 {
                if k == 1 {
                    2.0 * norm.exp()
                } else {
                    0.0
                }
            } else {
                2.0 * (norm + (kf - 1.0) * u.ln() - u * u / 2.0).exp()
            }
        };
        let upper = j.sqrt();
        let h = upper / n as f64;
        let mut s = density(0.0) + density(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * density(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(100.0) - 359.134_205_369_575_4).abs() < 1e-9);
    }

    #[test]
    fn zero_statistic_has_zero_probability() {
        for k in 1..50 {
            assert_eq!(chi_squared_cdf(0.0, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn ninety_five_percent_points() {
        assert!((chi_squared_cdf(5.991, 2).unwrap() - 0.950).abs() < 1e-3);
        assert!((chi_squared_cdf(3.841, 1).unwrap() - 0.950).abs() < 1e-3);
    }

    #[test]
    fn agrees_with_quadrature() {
        for &k in &[1usize, 2, 3, 7, 15, 40] {
            for &j in &[0.1, 1.0, 3.841, 5.991, 12.0, 30.0, 60.0] {
                let want = cdf_by_quadrature(j, k);
                let got = chi_squared_cdf(j, k).unwrap();
                assert!((got - want).abs() < 1e-9, "k={k} j={j}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn agrees_with_statrs() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        for k in [1usize, 2, 5, 15, 35, 200] {
            let d = ChiSquared::new(k as f64).unwrap();
            for j in [0.01, 0.5, 2.0, 10.0, 25.0, 100.0, 400.0, 1e4] {
                assert!((chi_squared_cdf(j, k).unwrap() - d.cdf(j)).abs() < 1e-10, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(chi_squared_cdf(-1.0, 3).is_err());
        assert!(chi_squared_cdf(f64::NAN, 3).is_err());
        assert!(chi_squared_cdf(1.0, 0).is_err());
        assert_eq!(chi_squared_cdf(f64::INFINITY, 3).unwrap(), 1.0);
    }

    #[test]
    fn monotone_in_statistic() {
        for k in [1usize, 4, 15] {
            let mut prev = 0.0;
            for i in 1..2000 {
                let p = chi_squared_cdf(i as f64 * 0.05, k).unwrap();
                assert!(p >= prev);
                prev = p;
            }
        }
    }
}
