//! Exact distribution of `S_n` on its lattice `L_n` by iterated convolution,
//! plus the span-corrected Gaussian local-limit approximation used as a
//! comparison envelope.

use std::io::Write;

use crate::distributions::LatticeStepDistribution;
use crate::error::{Error, Result};
use crate::lattice::{rational_to_f64, Coord, Lattice};
use crate::sig17;

/// Hard cap on retained grid keys per table.
pub const DEFAULT_KEY_CAP: usize = 10_000_000;

/// Probability masses of `S_n` over the retained window of `L_n`.
#[derive(Debug, Clone)]
pub struct DensityTable {
    n: u32,
    lo: i64,
    mass: Vec<f64>,
    defect: f64,
    lattice: Lattice,
}

impl DensityTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Offset of `L_n`, i.e. `n * gamma`.
    pub fn offset_f64(&self) -> f64 {
        f64::from(self.n) * self.lattice.gamma_f64()
    }

    pub fn key_range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.mass.len() as i64 - 1)
    }

    /// Mass at grid key `m` of `L_n`; 0 outside the retained window.
    pub fn mass_by_key(&self, key: i64) -> f64 {
        let idx = key - self.lo;
        if idx < 0 || idx >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[idx as usize]
        }
    }

    /// Mass at the point `x`; 0 when `x` is off the lattice.
    pub fn mass_at(&self, x: &Coord) -> f64 {
        match self.lattice.key_of(self.n, x) {
            Some(key) => self.mass_by_key(key),
            None => 0.0,
        }
    }

    pub fn key_of(&self, x: &Coord) -> Option<i64> {
        self.lattice.key_of(self.n, x)
    }

    /// Float value of grid key `m`.
    pub fn value_f64(&self, key: i64) -> f64 {
        self.lattice.value_f64(self.n, key)
    }

    pub fn masses(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, &m)| (self.lo + i as i64, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Probability mass dropped by tail truncation.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Writes the table as CSV (`x,mass`), 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,mass")?;
        for (key, m) in self.masses() {
            writeln!(w, "{},{}", sig17(self.value_f64(key)), sig17(m))?;
        }
        Ok(())
    }
}

/// Exact density of `S_n` with the default key cap.
pub fn exact_density(
    dist: &LatticeStepDistribution,
    n: u32,
    trunc_eps: f64,
) -> Result<DensityTable> {
    exact_density_capped(dist, n, trunc_eps, DEFAULT_KEY_CAP)
}

/// Exact density of `S_n`: n-fold convolution of the atom list in grid-key
/// space. Keys trimmed at the extreme tails are accumulated into the defect,
/// never silently lost. With `trunc_eps = 0` the table is exact up to float
/// rounding.
pub fn exact_density_capped(
    dist: &LatticeStepDistribution,
    n: u32,
    trunc_eps: f64,
    key_cap: usize,
) -> Result<DensityTable> {
    if n < 1 {
        return Err(Error::PreconditionViolated("n must be >= 1".into()));
    }
    if !(0.0..=1e-12).contains(&trunc_eps) {
        return Err(Error::PreconditionViolated(format!(
            "trunc_eps must lie in [0, 1e-12], got {trunc_eps:e}"
        )));
    }
    let atoms = dist.atoms();
    let a_lo = dist.min_key();
    let a_hi = dist.max_key();
    let step_budget = trunc_eps / f64::from(n);

    let mut lo = 0i64;
    let mut mass = vec![1.0f64];
    let mut defect = 0.0f64;
    for _ in 0..n {
        let next_len = mass.len() + (a_hi - a_lo) as usize;
        if next_len > key_cap {
            return Err(Error::SizeOverflow {
                needed: next_len as u64,
                cap: key_cap as u64,
            });
        }
        let mut next = vec![0.0f64; next_len];
        for (i, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for a in atoms {
                next[i + (a.key - a_lo) as usize] += m * a.prob;
            }
        }
        lo += a_lo;
        if step_budget > 0.0 {
            let (trim_lo, trimmed) = trim_tails(&mut next, step_budget);
            lo += trim_lo;
            defect += trimmed;
        }
        mass = next;
    }
    Ok(DensityTable {
        n,
        lo,
        mass,
        defect,
        lattice: dist.lattice().clone(),
    })
}

/// Drops leading/trailing entries whose summed mass stays within the budget
/// (half per tail). Returns the shift of the low key and the exact dropped
/// mass.
fn trim_tails(mass: &mut Vec<f64>, budget: f64) -> (i64, f64) {
    let side = budget / 2.0;
    let mut dropped = 0.0f64;
    let mut start = 0usize;
    let mut acc = 0.0f64;
    while start + 1 < mass.len() && acc + mass[start] <= side {
        acc += mass[start];
        start += 1;
    }
    dropped += acc;
    let mut end = mass.len();
    let mut acc = 0.0f64;
    while end > start + 1 && acc + mass[end - 1] <= side {
        acc += mass[end - 1];
        end -= 1;
    }
    dropped += acc;
    if start > 0 || end < mass.len() {
        mass.copy_within(start..end, 0);
        mass.truncate(end - start);
    }
    (start as i64, dropped)
}

/// Span-corrected Gaussian point-mass approximation
/// `lambda * e^{-x^2/2n} / sqrt(2 pi n)` together with the shape of the
/// local-limit error term, `|x| / (n^{3/2} (1 + x^2/n)) + n^{-3/2}`
/// (fourth-moment case). The shape is a comparison envelope, not an absolute
/// bound: the constant is left unspecified.
pub fn gaussian_llt_approx(
    dist: &LatticeStepDistribution,
    n: u32,
    x: &Coord,
) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::PreconditionViolated("n must be >= 1".into()));
    }
    dist.lattice().require_key(n, x)?;
    let xf = rational_to_f64(x);
    let nf = f64::from(n);
    let approx = dist.lattice().lambda_f64() * (-xf * xf / (2.0 * nf)).exp()
        / (2.0 * std::f64::consts::PI * nf).sqrt();
    let shape = xf.abs() / (nf.powf(1.5) * (1.0 + xf * xf / nf)) + nf.powf(-1.5);
    Ok((approx, shape))
}

/// Result of scanning a density table against the Gaussian approximation.
#[derive(Debug, Clone, Copy)]
pub struct DensityErrorReport {
    /// `sup |f_n(x) - lambda * phi_n(x)|` over the scanned range.
    pub sup_abs_err: f64,
    /// `sup f_n(x) * sqrt(n) / lambda`: checks that `f_n` is `O(1/sqrt(n))`.
    pub sup_scaled_mass: f64,
}

/// Scans all lattice points with `|x| <= x_max * sqrt(n)`.
pub fn density_error_report(
    dist: &LatticeStepDistribution,
    n: u32,
    x_max_multiple_of_sqrt_n: f64,
) -> Result<DensityErrorReport> {
    let table = exact_density(dist, n, 0.0)?;
    let nf = f64::from(n);
    let bound = x_max_multiple_of_sqrt_n * nf.sqrt();
    let lambda = dist.lattice().lambda_f64();
    let norm = 1.0 / (2.0 * std::f64::consts::PI * nf).sqrt();
    let mut sup_abs_err = 0.0f64;
    let mut sup_scaled_mass = 0.0f64;
    for (key, m) in table.masses() {
        let x = table.value_f64(key);
        if x.abs() > bound {
            continue;
        }
        let approx = lambda * (-x * x / (2.0 * nf)).exp() * norm;
        sup_abs_err = sup_abs_err.max((m - approx).abs());
        sup_scaled_mass = sup_scaled_mass.max(m * nf.sqrt() / lambda);
    }
    Ok(DensityErrorReport {
        sup_abs_err,
        sup_scaled_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_bernoulli, make_centered_poisson};
    use crate::lattice::coord;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_coin_flips() {
        let d = make_bernoulli();
        let t = exact_density(&d, 2, 0.0).unwrap();
        assert_eq!(t.mass_at(&coord(0)), 0.5);
        assert_eq!(t.mass_at(&coord(2)), 0.25);
        assert_eq!(t.mass_at(&coord(-2)), 0.25);
        assert_eq!(t.mass_at(&coord(4)), 0.0);
        assert_eq!(t.defect(), 0.0);
    }

    #[test]
    fn central_binomial_at_n_100() {
        let d = make_bernoulli();
        let t = exact_density(&d, 100, 0.0).unwrap();
        // Oracle: C(100,50) / 2^100 = prod_{k=1..50} (2k-1)/(2k).
        let expected: f64 = (1..=50).map(|k| (2 * k - 1) as f64 / (2 * k) as f64).product();
        assert_abs_diff_eq!(expected, 0.0795892, epsilon = 1e-7);
        assert_abs_diff_eq!(t.mass_at(&coord(0)), expected, epsilon = 1e-15);
    }

    #[test]
    fn single_step_table_equals_atom_list() {
        let d = make_centered_poisson(1e-14).unwrap();
        let t = exact_density(&d, 1, 0.0).unwrap();
        for a in d.atoms() {
            assert_eq!(t.mass_by_key(a.key), a.prob);
        }
        assert!(t.defect() <= 1e-14);
    }

    #[test]
    fn mass_is_conserved_under_truncation() {
        let d = make_centered_poisson(1e-14).unwrap();
        let t = exact_density(&d, 30, 1e-12).unwrap();
        assert!(t.defect() <= 1e-12);
        assert_abs_diff_eq!(t.total_mass() + t.defect(), 1.0, epsilon = 1e-12);
        // Truncation must actually shrink the window relative to eps = 0.
        let full = exact_density(&d, 30, 0.0).unwrap();
        assert!(t.mass.len() < full.mass.len());
        assert_abs_diff_eq!(full.total_mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_tables_are_symmetric() {
        let d = make_bernoulli();
        for n in [3u32, 8, 17, 64] {
            let t = exact_density(&d, n, 0.0).unwrap();
            for (key, m) in t.masses() {
                let x = t.value_f64(key);
                let mirror = t.key_of(&coord(-(x as i64))).unwrap();
                assert_eq!(m, t.mass_by_key(mirror), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn llt_approx_at_zero() {
        let d = make_bernoulli();
        let (approx, _) = gaussian_llt_approx(&d, 100, &coord(0)).unwrap();
        assert_abs_diff_eq!(approx, 0.07978845608028654, epsilon = 1e-16);
        let t = exact_density(&d, 100, 0.0).unwrap();
        let err = (t.mass_at(&coord(0)) - approx).abs();
        assert!(err < 1.0 / 100.0, "err = {err}");
        assert_abs_diff_eq!(err, 2.0e-4, epsilon = 1e-5);

        let p = make_centered_poisson(1e-14).unwrap();
        let (approx, _) = gaussian_llt_approx(&p, 400, &coord(0)).unwrap();
        assert_abs_diff_eq!(approx, 0.019947114020071635, epsilon = 1e-16);
        let t = exact_density(&p, 400, 0.0).unwrap();
        assert!((t.mass_at(&coord(0)) - approx).abs() <= 5.0 / 400.0);
    }

    #[test]
    fn llt_rejects_off_lattice_points() {
        let d = make_bernoulli();
        assert!(matches!(
            gaussian_llt_approx(&d, 100, &coord(1)),
            Err(Error::OffLattice { .. })
        ));
    }

    #[test]
    fn size_cap_is_enforced() {
        let d = make_bernoulli();
        assert!(matches!(
            exact_density_capped(&d, 64, 0.0, 10),
            Err(Error::SizeOverflow { .. })
        ));
    }

    #[test]
    fn error_report_peak_is_gaussian() {
        let d = make_bernoulli();
        let r = density_error_report(&d, 100, 2.0).unwrap();
        // Peak of the scaled mass is about phi(0) = 0.3989.
        assert!(r.sup_scaled_mass <= 0.5, "sup = {}", r.sup_scaled_mass);
        assert!(r.sup_scaled_mass >= 0.3);

        // Error decays faster than 1/n for the symmetric law.
        let r400 = density_error_report(&d, 400, 2.0).unwrap();
        assert!(r.sup_abs_err / r400.sup_abs_err >= 2.0);

        // n = 1 smoke case.
        let r1 = density_error_report(&d, 1, 2.0).unwrap();
        assert!(r1.sup_abs_err.is_finite());
    }

    #[test]
    fn semigroup_property() {
        let d = make_centered_poisson(1e-14).unwrap();
        let t8 = exact_density(&d, 8, 0.0).unwrap();
        let t16 = exact_density(&d, 16, 0.0).unwrap();
        // Convolve t8 with itself and compare pointwise.
        let (lo8, _) = t8.key_range();
        let vals: Vec<(i64, f64)> = t8.masses().collect();
        let mut conv = vec![0.0f64; 2 * vals.len() - 1];
        for &(ka, ma) in &vals {
            for &(kb, mb) in &vals {
                conv[((ka - lo8) + (kb - lo8)) as usize] += ma * mb;
            }
        }
        for (i, &m) in conv.iter().enumerate() {
            let key = 2 * lo8 + i as i64;
            assert_abs_diff_eq!(m, t16.mass_by_key(key), epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_dump_round_trips() {
        let d = make_bernoulli();
        let t = exact_density(&d, 4, 0.0).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,mass"));
        let mut total = 0.0;
        for line in lines {
            let (x, m) = line.split_once(',').unwrap();
            x.parse::<f64>().unwrap();
            total += m.parse::<f64>().unwrap();
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }
}
