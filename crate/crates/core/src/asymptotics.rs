//! Closed forms and limit formulas: normal CDF, the `2*Phi(x) - 1` running-
//! maximum limit, the `1 - e^{-2yz/n}` barrier main term, the +-1 reflection
//! formula, the ballot value, and the order-statistics boundary main term.

use num::rational::Ratio;

use crate::error::{Error, Result};

pub type Rational64 = Ratio<i64>;

/// Standard normal CDF via the complementary error function; absolute error
/// well below 1e-12 everywhere.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Limit law of the scaled running maximum: `2*Phi(x) - 1` for `x >= 0`,
/// evaluated as `erf(x / sqrt 2)` to keep accuracy near 0.
pub fn erdos_kac(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::NegativeArgument(x));
    }
    Ok(libm::erf(x / std::f64::consts::SQRT_2))
}

/// Main term `1 - e^{-2yz/n}` of the barrier-avoidance probability
/// `R_n(y - z, y)`, computed through expm1 so small exponents keep relative
/// accuracy. Expects `n >= 1`, `y >= 0`, `z >= 0`.
pub fn theorem1_approx(n: u32, y: f64, z: f64) -> f64 {
    debug_assert!(n >= 1 && y >= 0.0 && z >= 0.0);
    -libm::expm1(-2.0 * y * z / f64::from(n))
}

/// Reflection-principle value for the +-1 walk:
/// `R_n(x, y) = 1 - C(n, (n+x-2y)/2) / C(n, (n-x)/2)`, with out-of-range
/// binomials treated as 0 (and the `f_n(x) = 0` convention giving 1).
/// Valid for integer barriers `y >= 1` and `x < y`.
pub fn bernoulli_closed_form(n: u64, x: i64, y: i64) -> Result<f64> {
    let n_i = i64::try_from(n)
        .map_err(|_| Error::PreconditionViolated("n exceeds the supported range".into()))?;
    if (n_i + x).rem_euclid(2) != 0 {
        return Err(Error::ParityMismatch { n, x });
    }
    if y < 1 {
        return Err(Error::PreconditionViolated(
            "the reflection formula needs an integer barrier y >= 1".into(),
        ));
    }
    if x >= y {
        return Err(Error::PreconditionViolated(
            "the reflection formula needs x < y".into(),
        ));
    }
    let b = (n_i - x) / 2;
    if b < 0 || b > n_i {
        // x is unreachable: R = 1 by the f_n(x) = 0 convention.
        return Ok(1.0);
    }
    let a = (n_i + x) / 2 - y;
    if a < 0 || a > n_i {
        // No reflected path exists, the barrier is never reached.
        return Ok(1.0);
    }
    // C(n,a)/C(n,b) telescopes to prod_{k=a+1..b} k/(n-k+1). Since C(n, .)
    // is unimodal and a is farther from n/2 than b, every partial product
    // stays in (0, 1]: no overflow for n up to 10^6 and beyond.
    let mut ratio = 1.0f64;
    for k in (a + 1)..=b {
        ratio *= k as f64 / (n_i - k + 1) as f64;
    }
    Ok((1.0 - ratio).max(0.0))
}

/// Bertrand ballot value: with `p >= q` votes counted in random order, the
/// winner never trails with probability `(p - q + 1) / (p + 1)`.
pub fn ballot_probability(p: u32, q: u32) -> Result<Rational64> {
    if q > p {
        return Err(Error::InvalidCounts { p, q });
    }
    Ok(Rational64::new(
        i64::from(p - q + 1),
        i64::from(p) + 1,
    ))
}

/// Main term `1 - e^{-2uw/n}` of the order-statistics boundary probability
/// `Q_n(u, v)`, where `w = u + v - n`.
pub fn qnuv_approx(n: u32, u: f64, v: f64) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::NegativeArgument(u));
    }
    let w = u + v - f64::from(n);
    if w < 0.0 {
        return Err(Error::NegativeW(w));
    }
    Ok(-libm::expm1(-2.0 * u * w / f64::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: adaptive Simpson quadrature of the defining
    /// integral of Phi, tail below -12 dropped (it is under 2e-33).
    fn phi_quadrature(x: f64) -> f64 {
        fn pdf(t: f64) -> f64 {
            (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
        }
        fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
            (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        }
        fn adaptive(a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64) -> f64 {
            let m = 0.5 * (a + b);
            let lm = pdf(0.5 * (a + m));
            let rm = pdf(0.5 * (m + b));
            let left = simpson(a, m, fa, lm, fm);
            let right = simpson(m, b, fm, rm, fb);
            if (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                adaptive(a, m, fa, lm, fm, left, tol / 2.0)
                    + adaptive(m, b, fm, rm, fb, right, tol / 2.0)
            }
        }
        let (a, b) = (-12.0, x);
        let (fa, fm, fb) = (pdf(a), pdf(0.5 * (a + b)), pdf(b));
        let whole = simpson(a, b, fa, fm, fb);
        adaptive(a, b, fa, fm, fb, whole, 1e-14)
    }

    #[test]
    fn normal_cdf_against_quadrature_oracle() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for &x in &[-3.0, -1.0, -0.1, 0.3, 1.0, 2.5, 4.0] {
            assert_abs_diff_eq!(normal_cdf(x), phi_quadrature(x), epsilon = 1e-12);
        }
        // Frozen oracle value for Phi(1).
        assert_abs_diff_eq!(normal_cdf(1.0), 0.8413447460685429, epsilon = 1e-12);
        assert!(normal_cdf(-8.0) < 1e-14);
    }

    #[test]
    fn normal_cdf_symmetry_and_monotonicity() {
        let mut prev = 0.0;
        for i in -400..=400 {
            let x = f64::from(i) / 50.0;
            let p = normal_cdf(x);
            assert!((normal_cdf(-x) - (1.0 - p)).abs() <= 1e-14);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn erdos_kac_values() {
        assert_eq!(erdos_kac(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(erdos_kac(1.0).unwrap(), 0.6826894921370859, epsilon = 2e-12);
        assert!((erdos_kac(8.0).unwrap() - 1.0).abs() < 1e-13);
        assert!(matches!(erdos_kac(-0.5), Err(Error::NegativeArgument(_))));
    }

    #[test]
    fn main_term_values() {
        assert_eq!(theorem1_approx(10, 3.0, 0.0), 0.0);
        assert_abs_diff_eq!(
            theorem1_approx(100, 5.0, 5.0),
            0.3934693402873666,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            theorem1_approx(100, 10.0, 10.0),
            0.8646647167633873,
            epsilon = 1e-15
        );
    }

    #[test]
    fn reflection_formula_small_cases() {
        // Enumeration of the 16 four-step walks gives 1 - 4/6 at x = 0, y = 1.
        assert_abs_diff_eq!(
            bernoulli_closed_form(4, 0, 1).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bernoulli_closed_form(2, 0, 1).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            bernoulli_closed_form(3, 0, 1),
            Err(Error::ParityMismatch { .. })
        ));
        // Unreachable endpoint: convention value 1.
        assert_eq!(bernoulli_closed_form(4, -6, 1).unwrap(), 1.0);
    }

    #[test]
    fn reflection_formula_large_n() {
        let v = bernoulli_closed_form(1_000_000, 0, 1000).unwrap();
        assert!(v > 0.0 && v < 1.0);
        let main = theorem1_approx(1_000_000, 1000.0, 1000.0);
        assert!((v - main).abs() <= 0.01, "value {v}, main term {main}");
    }

    #[test]
    fn ballot_values() {
        assert_eq!(ballot_probability(2, 1).unwrap(), Rational64::new(2, 3));
        assert_eq!(ballot_probability(7, 7).unwrap(), Rational64::new(1, 8));
        assert_eq!(ballot_probability(5, 0).unwrap(), Rational64::new(1, 1));
        assert!(matches!(
            ballot_probability(1, 2),
            Err(Error::InvalidCounts { .. })
        ));
    }

    #[test]
    fn qnuv_main_term() {
        assert_eq!(qnuv_approx(10, 5.0, 5.0).unwrap(), 0.0); // w = 0
        assert_eq!(qnuv_approx(100, 0.0, 120.0).unwrap(), 0.0); // u = 0
        assert_abs_diff_eq!(
            qnuv_approx(100, 5.0, 100.0).unwrap(),
            0.3934693402873666,
            epsilon = 1e-15
        );
        assert!(matches!(
            qnuv_approx(100, 5.0, 80.0),
            Err(Error::NegativeW(_))
        ));
    }
}
