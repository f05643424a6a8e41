//! Exact bookkeeping for the lattice `{gamma + m*lambda : m in Z}` carrying a
//! step law, and for the shifted lattices `L_n = {n*gamma + m*lambda}` that
//! carry the n-step sums.
//!
//! Coordinates are exact rationals so that membership questions ("is x a
//! point of L_n?") are decided by integer arithmetic, never by comparing
//! floats. Laws standardized by an irrational scale factor keep their exact
//! integer key structure but fall back to guarded float snapping when a
//! physical coordinate has to be mapped to a key.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational coordinate.
pub type Coord = BigRational;

/// Relative tolerance for snapping coordinates onto an inexact lattice.
const SNAP_TOL: f64 = 1e-9;

/// `k` as an exact coordinate.
pub fn coord(k: i64) -> Coord {
    BigRational::from_integer(BigInt::from(k))
}

/// `num/den` as an exact coordinate.
pub fn coord_ratio(num: i64, den: i64) -> Coord {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p/q", an integer, or a plain decimal ("-1.25") into an exact
/// rational. Decimals convert exactly (d.ddd = integer / power of ten).
pub fn parse_coord(s: &str) -> Result<Coord> {
    let s = s.trim();
    let bad = || Error::InvalidSpec(format!("cannot parse `{s}` as a rational number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let (sign, digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let joined = format!("{digits}{frac_part}");
        let numer: BigInt = joined.parse().map_err(|_| bad())?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(BigRational::new(numer * BigInt::from(sign), denom));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// The lattice of a step law: offset `gamma`, maximal span `lambda`.
#[derive(Debug, Clone)]
pub struct Lattice {
    /// Exact offset and span; `None` when the law was standardized by an
    /// irrational scale and only float values are available.
    gamma: Option<Coord>,
    lambda: Option<Coord>,
    gamma_f: f64,
    lambda_f: f64,
}

impl Lattice {
    /// Exact lattice with the offset reduced into `[0, lambda)`.
    pub(crate) fn new_exact(gamma: Coord, lambda: Coord) -> Self {
        assert!(lambda.is_positive(), "span must be positive");
        let gamma = &gamma - &lambda * (&gamma / &lambda).floor();
        let gamma_f = rational_to_f64(&gamma);
        let lambda_f = rational_to_f64(&lambda);
        Lattice {
            gamma: Some(gamma),
            lambda: Some(lambda),
            gamma_f,
            lambda_f,
        }
    }

    /// Float-only lattice (standardization by an irrational sigma), offset
    /// reduced into `[0, lambda)`.
    pub(crate) fn new_approx(gamma_f: f64, lambda_f: f64) -> Self {
        assert!(lambda_f > 0.0, "span must be positive");
        let gamma_f = gamma_f - lambda_f * (gamma_f / lambda_f).floor();
        Lattice {
            gamma: None,
            lambda: None,
            gamma_f,
            lambda_f,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.gamma.is_some()
    }

    pub fn gamma(&self) -> Option<&Coord> {
        self.gamma.as_ref()
    }

    pub fn lambda(&self) -> Option<&Coord> {
        self.lambda.as_ref()
    }

    pub fn gamma_f64(&self) -> f64 {
        self.gamma_f
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda_f
    }

    /// Physical value of key `m` on `L_n`, as a float.
    pub fn value_f64(&self, n: u32, key: i64) -> f64 {
        f64::from(n) * self.gamma_f + key as f64 * self.lambda_f
    }

    /// Physical value of key `m` on `L_n`, exactly. `None` for inexact lattices.
    pub fn value_coord(&self, n: u32, key: i64) -> Option<Coord> {
        let gamma = self.gamma.as_ref()?;
        let lambda = self.lambda.as_ref()?;
        Some(gamma * coord(i64::from(n)) + lambda * coord(key))
    }

    /// Key of `x` on `L_n`, or `None` when `x` is off the lattice.
    pub fn key_of(&self, n: u32, x: &Coord) -> Option<i64> {
        match (&self.gamma, &self.lambda) {
            (Some(gamma), Some(lambda)) => {
                let t = (x - gamma * coord(i64::from(n))) / lambda;
                if t.is_integer() {
                    t.to_integer().to_i64()
                } else {
                    None
                }
            }
            _ => {
                let xf = rational_to_f64(x);
                let t = (xf - f64::from(n) * self.gamma_f) / self.lambda_f;
                let k = t.round();
                let back = self.value_f64(n, k as i64);
                if (xf - back).abs() <= SNAP_TOL * xf.abs().max(1.0) {
                    Some(k as i64)
                } else {
                    None
                }
            }
        }
    }

    /// Key of `x` on `L_n` or an `OffLattice` error.
    pub fn require_key(&self, n: u32, x: &Coord) -> Result<i64> {
        self.key_of(n, x).ok_or_else(|| Error::OffLattice {
            point: x.to_string(),
            n,
        })
    }

    /// Smallest key of `L_n` whose value is `>= y` (used as the first
    /// at-or-above-the-barrier key). Keys below it have value `< y`.
    pub fn first_key_at_or_above(&self, n: u32, y: &Coord) -> i64 {
        match (&self.gamma, &self.lambda) {
            (Some(gamma), Some(lambda)) => {
                let t = (y - gamma * coord(i64::from(n))) / lambda;
                let c = t.ceil().to_integer();
                c.to_i64().unwrap_or(i64::MAX)
            }
            _ => {
                let t = (rational_to_f64(y) - f64::from(n) * self.gamma_f) / self.lambda_f;
                ceil_with_snap(t)
            }
        }
    }

    /// Largest key of `L_n` whose value is `<= h` (non-strict threshold).
    pub fn last_key_at_or_below(&self, n: u32, h: &Coord) -> i64 {
        match (&self.gamma, &self.lambda) {
            (Some(gamma), Some(lambda)) => {
                let t = (h - gamma * coord(i64::from(n))) / lambda;
                let f = t.floor().to_integer();
                f.to_i64().unwrap_or(i64::MIN)
            }
            _ => {
                let t = (rational_to_f64(h) - f64::from(n) * self.gamma_f) / self.lambda_f;
                floor_with_snap(t)
            }
        }
    }

    /// Smallest key of `L_n` whose value is strictly `> s`.
    pub fn first_key_above(&self, n: u32, s: &Coord) -> i64 {
        self.last_key_at_or_below(n, s).saturating_add(1)
    }

    /// Nearest lattice point of `L_n` to the target value; requires an exact
    /// lattice. Returns the key and the exact coordinate.
    pub fn snap(&self, n: u32, target: f64) -> Result<(i64, Coord)> {
        let key = ((target - f64::from(n) * self.gamma_f) / self.lambda_f).round() as i64;
        let value = self.value_coord(n, key).ok_or_else(|| {
            Error::PreconditionViolated("snapping requires an exact rational lattice".into())
        })?;
        Ok((key, value))
    }

    /// Nearest integer multiple of the span to the target value (used for
    /// barrier offsets z so that y - z stays on L_n). Exact lattices only.
    pub fn snap_step_multiple(&self, target: f64) -> Result<(i64, Coord)> {
        let k = (target / self.lambda_f).round() as i64;
        let lambda = self.lambda.as_ref().ok_or_else(|| {
            Error::PreconditionViolated("snapping requires an exact rational lattice".into())
        })?;
        Ok((k, lambda * coord(k)))
    }
}

/// `BigRational -> f64`, robust to numerators/denominators that individually
/// overflow f64 range (not expected here, but cheap to guard).
pub fn rational_to_f64(r: &Coord) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let approx = BigRational::from_f64(1e300).map(|big| r / big);
        approx.and_then(|x| x.to_f64()).map_or(f64::NAN, |x| x * 1e300)
    })
}

fn ceil_with_snap(t: f64) -> i64 {
    let r = t.round();
    if (t - r).abs() <= SNAP_TOL * t.abs().max(1.0) {
        r as i64
    } else {
        t.ceil() as i64
    }
}

fn floor_with_snap(t: f64) -> i64 {
    let r = t.round();
    if (t - r).abs() <= SNAP_TOL * t.abs().max(1.0) {
        r as i64
    } else {
        t.floor() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rationals_and_decimals() {
        assert_eq!(parse_coord("1/2").unwrap(), coord_ratio(1, 2));
        assert_eq!(parse_coord("-3").unwrap(), coord(-3));
        assert_eq!(parse_coord("0.25").unwrap(), coord_ratio(1, 4));
        assert_eq!(parse_coord("-1.5").unwrap(), coord_ratio(-3, 2));
        assert!(parse_coord("abc").is_err());
        assert!(parse_coord("1/0").is_err());
        assert!(parse_coord("").is_err());
    }

    #[test]
    fn bernoulli_lattice_keys() {
        // offset 1, span 2: the +-1 walk.
        let lat = Lattice::new_exact(coord(1), coord(2));
        assert_eq!(lat.key_of(1, &coord(-1)), Some(-1));
        assert_eq!(lat.key_of(1, &coord(1)), Some(0));
        assert_eq!(lat.key_of(1, &coord(0)), None);
        // L_2 has offset 2: even integers.
        assert_eq!(lat.key_of(2, &coord(0)), Some(-1));
        assert_eq!(lat.key_of(2, &coord(3)), None);
    }

    #[test]
    fn barrier_threshold_keys() {
        let lat = Lattice::new_exact(coord(0), coord(1));
        // First key at or above y = 2 on L_5 is 2; strict-below keys end at 1.
        assert_eq!(lat.first_key_at_or_above(5, &coord(2)), 2);
        assert_eq!(lat.last_key_at_or_below(5, &coord(2)), 2);
        assert_eq!(lat.first_key_above(5, &coord(2)), 3);
        assert_eq!(lat.first_key_at_or_above(5, &coord_ratio(3, 2)), 2);
        assert_eq!(lat.last_key_at_or_below(5, &coord_ratio(3, 2)), 1);
    }

    #[test]
    fn offset_is_canonicalized() {
        let lat = Lattice::new_exact(coord(-1), coord(2));
        assert_eq!(lat.gamma().unwrap(), &coord(1));
        assert_eq!(lat.gamma_f64(), 1.0);
    }

    #[test]
    fn approx_lattice_snaps_with_guard() {
        let lat = Lattice::new_approx(0.0, 0.7071067811865476);
        assert_eq!(lat.key_of(1, &coord_ratio(7071067811865476, 10_000_000_000_000_000)), Some(1));
        assert_eq!(lat.key_of(1, &coord_ratio(1, 3)), None);
    }
}
