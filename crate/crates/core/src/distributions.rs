//! Step laws: finitely supported, mean-zero variance-one distributions on a
//! lattice `gamma + m*lambda`, with exact span/offset bookkeeping and cached
//! moments.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{coord, rational_to_f64, Coord, Lattice};

/// Mean and variance must sit within this band of (0, 1) unless the caller
/// asked for standardization.
const STANDARD_TOL: f64 = 1e-9;
/// Atom probabilities must sum to 1 within this band before renormalization.
const MASS_TOL: f64 = 1e-12;

/// One support point of a step law.
#[derive(Debug, Clone)]
pub struct Atom {
    /// Grid key `m`: the value is `gamma + m * lambda`.
    pub key: i64,
    /// Float rendering of the value.
    pub value: f64,
    /// Probability mass, renormalized so the atoms sum to 1.
    pub prob: f64,
}

/// The law of a single step `X_1`.
#[derive(Debug, Clone)]
pub struct LatticeStepDistribution {
    atoms: Vec<Atom>,
    lattice: Lattice,
    /// `(alpha_u, beta_u) = (E X^u, E |X|^u)` for `u = 1..=4`.
    moment_cache: [(f64, f64); 4],
    truncation_defect: f64,
}

/// On-disk description of a custom step law.
///
/// ```json
/// {"base_step": "1/1", "gamma": 0,
///  "atoms": [{"key": -1, "prob": 0.5}, {"key": 1, "prob": 0.5}],
///  "standardize": false}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub base_step: RationalSpec,
    #[serde(default)]
    pub gamma: RationalSpec,
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub standardize: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub key: i64,
    pub prob: f64,
}

/// A rational number in a spec file: either an integer or a string like
/// "1/2" or "0.25".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl Default for RationalSpec {
    fn default() -> Self {
        RationalSpec::Int(0)
    }
}

impl RationalSpec {
    pub fn to_coord(&self) -> Result<Coord> {
        match self {
            RationalSpec::Int(k) => Ok(coord(*k)),
            RationalSpec::Text(s) => crate::lattice::parse_coord(s),
        }
    }
}

/// The simple +-1 walk: `P[X = 1] = P[X = -1] = 1/2`.
pub fn make_bernoulli() -> LatticeStepDistribution {
    LatticeStepDistribution::from_exact_parts(vec![(coord(-1), 0.5), (coord(1), 0.5)], false, 0.0)
        .expect("the +-1 law is standardized by construction")
}

/// The centered unit Poisson step `X = R - 1` with `P[R = r] = e^{-1}/r!`,
/// truncated at tail mass below `tail_eps` and renormalized.
pub fn make_centered_poisson(tail_eps: f64) -> Result<LatticeStepDistribution> {
    if !(tail_eps > 0.0 && tail_eps <= 1e-14) {
        return Err(Error::PreconditionViolated(format!(
            "tail_eps must lie in (0, 1e-14], got {tail_eps:e}"
        )));
    }
    // Terms e^{-1}/r!; by r = 40 the term is ~1e-49, far below any allowed eps.
    let mut terms = Vec::with_capacity(48);
    let mut p = (-1.0f64).exp();
    for r in 0..48u32 {
        if r > 0 {
            p /= f64::from(r);
        }
        terms.push(p);
    }
    // Smallest R whose tail sum (summed forward, smallest terms last) is below eps.
    let mut cut = terms.len();
    let mut tail = 0.0f64;
    for r in (1..terms.len()).rev() {
        tail += terms[r];
        if tail < tail_eps {
            cut = r;
        }
    }
    let retained = &terms[..cut];
    let defect: f64 = terms[cut..].iter().sum();
    let values = retained
        .iter()
        .enumerate()
        .map(|(r, &p)| (coord(r as i64 - 1), p))
        .collect();
    LatticeStepDistribution::from_exact_parts(values, false, defect)
}

/// Builds a custom law from a spec: exact span/offset computation, optional
/// standardization `X -> (X - mu)/sigma`.
pub fn make_custom_lattice(spec: &DistributionSpec) -> Result<LatticeStepDistribution> {
    let base = spec.base_step.to_coord()?;
    if !base.is_positive() {
        return Err(Error::InvalidSpec("base_step must be positive".into()));
    }
    let gamma = spec.gamma.to_coord()?;
    if spec.atoms.is_empty() {
        return Err(Error::InvalidSpec("spec has no atoms".into()));
    }
    let values = spec
        .atoms
        .iter()
        .map(|a| (&gamma + &base * coord(a.key), a.prob))
        .collect();
    LatticeStepDistribution::from_exact_parts(values, spec.standardize, 0.0)
}

/// Parses a JSON `DistributionSpec` and builds the law.
pub fn from_spec_json(json: &str) -> Result<LatticeStepDistribution> {
    let spec: DistributionSpec =
        serde_json::from_str(json).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    make_custom_lattice(&spec)
}

impl LatticeStepDistribution {
    /// Core constructor from exact (value, prob) pairs.
    fn from_exact_parts(
        values: Vec<(Coord, f64)>,
        standardize: bool,
        truncation_defect: f64,
    ) -> Result<Self> {
        for &(_, p) in &values {
            if !(p > 0.0) {
                return Err(Error::NegativeProb(p));
            }
        }
        let sum: f64 = values.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMass(sum));
        }
        // Merge duplicate support points, renormalize.
        let mut values: Vec<(Coord, f64)> = values;
        values.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Coord, f64)> = Vec::with_capacity(values.len());
        for (v, p) in values {
            match merged.last_mut() {
                Some((last, lp)) if *last == v => *lp += p / sum,
                _ => merged.push((v, p / sum)),
            }
        }

        // Exact mean and variance; f64 probabilities are themselves exact
        // dyadic rationals.
        let mut mean = Coord::zero();
        let mut second = Coord::zero();
        for (v, p) in &merged {
            let p = BigRational::from_f64(*p)
                .ok_or_else(|| Error::InvalidSpec("atom probability is not finite".into()))?;
            mean += v * &p;
            second += v * v * &p;
        }
        let var = &second - &mean * &mean;
        let mean_f = rational_to_f64(&mean);
        let var_f = rational_to_f64(&var);

        let already_standard = mean.is_zero() && var.is_one();
        if !standardize || already_standard {
            if mean_f.abs() > STANDARD_TOL || (var_f - 1.0).abs() > STANDARD_TOL {
                return Err(Error::NonStandardized {
                    mean: mean_f,
                    variance: var_f,
                });
            }
            return Self::assemble_exact(merged, truncation_defect);
        }

        if var_f <= 0.0 {
            return Err(Error::NonStandardized {
                mean: mean_f,
                variance: var_f,
            });
        }
        if let Some(sigma) = rational_sqrt(&var) {
            let mapped = merged
                .into_iter()
                .map(|(v, p)| ((v - &mean) / &sigma, p))
                .collect();
            return Self::assemble_exact(mapped, truncation_defect);
        }
        // Irrational sigma: the affine map preserves the integer key
        // structure, but the physical grid is only available as floats.
        Self::assemble_approx(merged, mean_f, var_f.sqrt(), truncation_defect)
    }

    fn assemble_exact(values: Vec<(Coord, f64)>, truncation_defect: f64) -> Result<Self> {
        // Integer coordinates over the common denominator, then the maximal
        // span is gcd(differences) / denominator.
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, (v, _)| acc.lcm(v.denom()));
        let ints: Vec<BigInt> = values
            .iter()
            .map(|(v, _)| v.numer() * (&denom / v.denom()))
            .collect();
        let g = ints
            .iter()
            .skip(1)
            .fold(BigInt::zero(), |acc, w| acc.gcd(&(w - &ints[0])));
        if g.is_zero() {
            // Single support point: cannot have unit variance.
            return Err(Error::NonStandardized {
                mean: rational_to_f64(&values[0].0),
                variance: 0.0,
            });
        }
        let lambda = BigRational::new(g, denom);
        let lattice = Lattice::new_exact(values[0].0.clone(), lambda);
        let atoms = values
            .iter()
            .map(|(v, p)| {
                let key = lattice
                    .key_of(1, v)
                    .expect("support points lie on the derived lattice");
                Atom {
                    key,
                    value: rational_to_f64(v),
                    prob: *p,
                }
            })
            .collect();
        Ok(Self::finish(atoms, lattice, truncation_defect))
    }

    fn assemble_approx(
        values: Vec<(Coord, f64)>,
        mean: f64,
        sigma: f64,
        truncation_defect: f64,
    ) -> Result<Self> {
        // Span of the pre-standardized grid, scaled by 1/sigma.
        let pre = Self::assemble_exact_grid_only(&values)?;
        let lambda = pre.lambda_f64() / sigma;
        let gamma = (pre.gamma_f64() - mean) / sigma;
        let lattice = Lattice::new_approx(gamma, lambda);
        let atoms = values
            .iter()
            .map(|(v, p)| {
                let value = (rational_to_f64(v) - mean) / sigma;
                let key = ((value - lattice.gamma_f64()) / lattice.lambda_f64()).round() as i64;
                Atom {
                    key,
                    value,
                    prob: *p,
                }
            })
            .collect();
        Ok(Self::finish(atoms, lattice, truncation_defect))
    }

    /// Grid of the raw (unstandardized) values, used to carry the key
    /// structure through an inexact standardization.
    fn assemble_exact_grid_only(values: &[(Coord, f64)]) -> Result<Lattice> {
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, (v, _)| acc.lcm(v.denom()));
        let ints: Vec<BigInt> = values
            .iter()
            .map(|(v, _)| v.numer() * (&denom / v.denom()))
            .collect();
        let g = ints
            .iter()
            .skip(1)
            .fold(BigInt::zero(), |acc, w| acc.gcd(&(w - &ints[0])));
        if g.is_zero() {
            return Err(Error::NonStandardized {
                mean: rational_to_f64(&values[0].0),
                variance: 0.0,
            });
        }
        Ok(Lattice::new_exact(
            values[0].0.clone(),
            BigRational::new(g, denom),
        ))
    }

    fn finish(mut atoms: Vec<Atom>, lattice: Lattice, truncation_defect: f64) -> Self {
        atoms.sort_by_key(|a| a.key);
        debug_assert!(
            {
                let g = atoms
                    .iter()
                    .skip(1)
                    .fold(0i64, |acc, a| num::integer::gcd(acc, a.key - atoms[0].key));
                atoms.len() < 2 || g == 1
            },
            "span is maximal: key differences have gcd 1"
        );
        let mut cache = [(0.0, 0.0); 4];
        for (idx, entry) in cache.iter_mut().enumerate() {
            let u = (idx + 1) as i32;
            let mut alpha = 0.0;
            let mut beta = 0.0;
            for a in &atoms {
                alpha += a.prob * a.value.powi(u);
                beta += a.prob * a.value.abs().powi(u);
            }
            *entry = (alpha, beta);
        }
        LatticeStepDistribution {
            atoms,
            lattice,
            moment_cache: cache,
            truncation_defect,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn truncation_defect(&self) -> f64 {
        self.truncation_defect
    }

    pub fn min_key(&self) -> i64 {
        self.atoms.first().map_or(0, |a| a.key)
    }

    pub fn max_key(&self) -> i64 {
        self.atoms.last().map_or(0, |a| a.key)
    }

    /// Probability of the atom at grid key `m` (0 when absent).
    pub fn prob_by_key(&self, key: i64) -> f64 {
        self.atoms
            .binary_search_by_key(&key, |a| a.key)
            .map_or(0.0, |i| self.atoms[i].prob)
    }

    /// `(alpha_u, beta_u) = (E X^u, E |X|^u)`; alpha is defined for integer
    /// powers only.
    pub fn moments(&self, u: f64) -> Result<(f64, f64)> {
        if u < 1.0 {
            return Err(Error::PreconditionViolated(format!(
                "moment order must be >= 1, got {u}"
            )));
        }
        if u.fract() != 0.0 || u > i32::MAX as f64 {
            return Err(Error::NonIntegerPowerForAlpha(u));
        }
        let k = u as i32;
        if (1..=4).contains(&k) {
            return Ok(self.moment_cache[(k - 1) as usize]);
        }
        let mut alpha = 0.0;
        let mut beta = 0.0;
        for a in &self.atoms {
            alpha += a.prob * a.value.powi(k);
            beta += a.prob * a.value.abs().powi(k);
        }
        Ok((alpha, beta))
    }

    /// Absolute moment `beta_u = E |X|^u`, defined for all real `u >= 1`.
    pub fn beta_moment(&self, u: f64) -> Result<f64> {
        if u < 1.0 {
            return Err(Error::PreconditionViolated(format!(
                "moment order must be >= 1, got {u}"
            )));
        }
        Ok(self
            .atoms
            .iter()
            .map(|a| a.prob * a.value.abs().powf(u))
            .sum())
    }

    pub fn mean(&self) -> f64 {
        self.moment_cache[0].0
    }

    pub fn variance(&self) -> f64 {
        self.moment_cache[1].0
    }

    /// Atom values as integers over a common denominator `d`:
    /// `value_i = units_i / d` exactly. `None` for inexact lattices or when
    /// the integers do not fit in i64.
    pub fn integer_value_units(&self) -> Option<(i64, Vec<i64>)> {
        let gamma = self.lattice.gamma()?;
        let lambda = self.lattice.lambda()?;
        let denom = gamma.denom().lcm(lambda.denom());
        let d = denom.to_i64()?;
        let mut units = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let v = self.lattice.value_coord(1, a.key)?;
            let unit = (v.numer() * (&denom / v.denom())).to_i64()?;
            units.push(unit);
        }
        Some((d, units))
    }
}

/// Exact square root of a positive rational, when it is itself rational.
fn rational_sqrt(r: &Coord) -> Option<Coord> {
    use num::integer::Roots;
    if !r.is_positive() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}
