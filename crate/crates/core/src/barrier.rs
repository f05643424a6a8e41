//! Exact computation of the joint barrier quantity
//! `Rtilde_n(x, y) = P[T_{n-1} < y, S_n = x]` by confined-walk dynamic
//! programming, together with the recursion identities, rough-bound
//! diagnostics and overshoot sums built on top of it.
//!
//! The DP keeps, for every `k`, the sub-probability layer
//! `g_k(s) = P[S_1 < y, ..., S_k < y, S_k = s]` and the crossing row (mass
//! landing at or above `y` at step `k`). One pass therefore yields
//! `Rtilde_k(., y)` for every `k <= n`: below the barrier it is the layer
//! itself, at or above it is the crossing row.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::theorem1_approx;
use crate::density::{exact_density, DensityTable, DEFAULT_KEY_CAP};
use crate::distributions::LatticeStepDistribution;
use crate::error::{Error, Result};
use crate::lattice::{rational_to_f64, Coord};
use crate::sig17;

/// Default state-space trim budget: exact for desk-scale `n`, a tracked
/// 1e-12 total for larger horizons.
pub fn default_truncation(n: u32) -> f64 {
    if n <= 2048 {
        0.0
    } else {
        1e-12
    }
}

/// One sub-probability row over a window of grid keys.
#[derive(Debug, Clone, Default)]
struct Row {
    lo: i64,
    mass: Vec<f64>,
}

impl Row {
    fn get(&self, key: i64) -> f64 {
        let idx = key - self.lo;
        if idx < 0 || idx >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[idx as usize]
        }
    }

    fn sum(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, &m)| (self.lo + i as i64, m))
    }
}

/// The confined-walk solution for one `(law, y, n)` triple.
#[derive(Debug, Clone)]
pub struct BarrierSolution {
    n: u32,
    y: Coord,
    y_f: f64,
    dist: LatticeStepDistribution,
    /// `g_0 .. g_n`; layer `k` lives on `L_k`, restricted to values `< y`.
    layers: Vec<Row>,
    /// `crossings[k-1]`: mass landing at values `>= y` at step `k`.
    crossings: Vec<Row>,
    /// `cuts[k]`: first key of `L_k` whose value is `>= y`.
    cuts: Vec<i64>,
    /// Mass absorbed at or above the barrier during steps `1..n-1`.
    absorbed_above: f64,
    /// Mass dropped by lower-tail state trimming, tracked exactly.
    defect: f64,
}

/// Builds the solution with the default trim policy and key cap.
pub fn rtilde_exact(
    dist: &LatticeStepDistribution,
    n: u32,
    y: &Coord,
) -> Result<BarrierSolution> {
    build_confined(dist, y, n, default_truncation(n), DEFAULT_KEY_CAP)
}

fn build_confined(
    dist: &LatticeStepDistribution,
    y: &Coord,
    steps: u32,
    trim_budget: f64,
    key_cap: usize,
) -> Result<BarrierSolution> {
    use num::Signed;
    if steps < 1 {
        return Err(Error::PreconditionViolated("n must be >= 1".into()));
    }
    let lattice = dist.lattice();
    let y_f = rational_to_f64(y);
    let cuts: Vec<i64> = (0..=steps)
        .map(|k| lattice.first_key_at_or_above(k, y))
        .collect();

    if !y.is_positive() {
        // T_{n-1} >= 0 always: everything is absorbed.
        return Ok(BarrierSolution {
            n: steps,
            y: y.clone(),
            y_f,
            dist: dist.clone(),
            layers: vec![Row::default(); steps as usize + 1],
            crossings: vec![Row::default(); steps as usize],
            cuts,
            absorbed_above: 1.0,
            defect: 0.0,
        });
    }

    let atoms = dist.atoms();
    let a_lo = dist.min_key();
    let a_hi = dist.max_key();
    let layer_budget = if trim_budget > 0.0 {
        trim_budget / f64::from(steps)
    } else {
        0.0
    };

    let mut layers = Vec::with_capacity(steps as usize + 1);
    let mut crossings = Vec::with_capacity(steps as usize);
    layers.push(Row {
        lo: 0,
        mass: vec![1.0],
    });
    let mut absorbed_above = 0.0f64;
    let mut defect = 0.0f64;

    for k in 1..=steps {
        let prev = &layers[(k - 1) as usize];
        if prev.mass.is_empty() {
            layers.push(Row::default());
            crossings.push(Row::default());
            continue;
        }
        let lo = prev.lo + a_lo;
        let len = prev.mass.len() + (a_hi - a_lo) as usize;
        if len > key_cap {
            return Err(Error::SizeOverflow {
                needed: len as u64,
                cap: key_cap as u64,
            });
        }
        let mut full = vec![0.0f64; len];
        for (i, &m) in prev.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for a in atoms {
                full[i + (a.key - a_lo) as usize] += m * a.prob;
            }
        }
        // Split at the barrier: keys < cut stay confined, the rest cross.
        let cut = cuts[k as usize];
        let below_len = ((cut - lo).max(0) as usize).min(full.len());
        let cross_mass = full.split_off(below_len);
        let crossing = Row {
            lo: lo + below_len as i64,
            mass: cross_mass,
        };
        let mut below = Row { lo, mass: full };
        if layer_budget > 0.0 {
            defect += trim_lower_tail(&mut below, layer_budget);
        }
        if k < steps {
            absorbed_above += crossing.sum();
        }
        layers.push(below);
        crossings.push(crossing);
    }

    Ok(BarrierSolution {
        n: steps,
        y: y.clone(),
        y_f,
        dist: dist.clone(),
        layers,
        crossings,
        cuts,
        absorbed_above,
        defect,
    })
}

/// Drops the lowest-key states whose cumulative mass stays within the
/// budget. Returns the exact dropped mass.
fn trim_lower_tail(row: &mut Row, budget: f64) -> f64 {
    let mut acc = 0.0f64;
    let mut start = 0usize;
    while start + 1 < row.mass.len() && acc + row.mass[start] <= budget {
        acc += row.mass[start];
        start += 1;
    }
    if start > 0 {
        row.mass.drain(..start);
        row.lo += start as i64;
    }
    acc
}

impl BarrierSolution {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn y(&self) -> &Coord {
        &self.y
    }

    pub fn y_f64(&self) -> f64 {
        self.y_f
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Mass absorbed at or above the barrier during steps `1..n-1`.
    pub fn absorbed_above(&self) -> f64 {
        self.absorbed_above
    }

    /// `Rtilde_k(., y)` at grid key `m` of `L_k`, for any `1 <= k <= n`.
    pub fn rtilde_step_by_key(&self, k: u32, key: i64) -> f64 {
        debug_assert!(k >= 1 && k <= self.n);
        if key < self.cuts[k as usize] {
            self.layers[k as usize].get(key)
        } else {
            self.crossings[(k - 1) as usize].get(key)
        }
    }

    /// `Rtilde_n(., y)` at grid key `m` of `L_n`.
    pub fn rtilde_by_key(&self, key: i64) -> f64 {
        self.rtilde_step_by_key(self.n, key)
    }

    /// `Rtilde_n(x, y)`; 0 when `x` is off the lattice.
    pub fn rtilde_at(&self, x: &Coord) -> f64 {
        match self.dist.lattice().key_of(self.n, x) {
            Some(key) => self.rtilde_by_key(key),
            None => 0.0,
        }
    }

    /// Final-table entries `(key, Rtilde_n)` in key order.
    pub fn final_masses(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.layers[self.n as usize]
            .entries()
            .chain(self.crossings[(self.n - 1) as usize].entries())
    }

    /// Crossing row of step `k`: `(key, Rtilde_k(y + xi, y))` with
    /// `xi = value - y >= 0`.
    pub fn crossing_masses(&self, k: u32) -> impl Iterator<Item = (i64, f64)> + '_ {
        debug_assert!(k >= 1 && k <= self.n);
        self.crossings[(k - 1) as usize].entries()
    }

    /// Total confined mass of layer `k` (`sum_s g_k(s)`).
    pub fn layer_total(&self, k: u32) -> f64 {
        self.layers[k as usize].sum()
    }

    pub fn total_final(&self) -> f64 {
        self.layers[self.n as usize].sum() + self.crossings[(self.n - 1) as usize].sum()
    }

    pub fn lattice(&self) -> &crate::lattice::Lattice {
        self.dist.lattice()
    }

    /// Fault-injection hook for the verification suite: bumps the largest
    /// final-table mass by `eps` so identity residuals become visible.
    /// Returns the grid key that was perturbed.
    pub fn perturb_largest_final_mass(&mut self, eps: f64) -> Option<i64> {
        let n = self.n as usize;
        let pick = |row: &Row| {
            row.mass
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
        };
        let (in_layer, idx) = match (pick(&self.layers[n]), pick(&self.crossings[n - 1])) {
            (Some(i), None) => (true, i),
            (None, Some(j)) => (false, j),
            (Some(i), Some(j)) => {
                if self.layers[n].mass[i] >= self.crossings[n - 1].mass[j] {
                    (true, i)
                } else {
                    (false, j)
                }
            }
            (None, None) => return None,
        };
        if in_layer {
            self.layers[n].mass[idx] += eps;
            Some(self.layers[n].lo + idx as i64)
        } else {
            self.crossings[n - 1].mass[idx] += eps;
            Some(self.crossings[n - 1].lo + idx as i64)
        }
    }
}

/// `R_n(x, y) = Rtilde_n(x, y) / f_n(x)`, with the convention `R = 1`
/// wherever `f_n(x) = 0` (including off-lattice points, which carry no
/// mass).
pub fn r_conditional(
    dist: &LatticeStepDistribution,
    n: u32,
    x: &Coord,
    y: &Coord,
) -> Result<f64> {
    let sol = rtilde_exact(dist, n, y)?;
    let dens = exact_density(dist, n, default_truncation(n))?;
    conditional_from(&sol, &dens, x)
}

/// Same as [`r_conditional`] with prebuilt pieces (one solution and one
/// density table serve many `x`).
pub fn conditional_from(
    sol: &BarrierSolution,
    dens: &DensityTable,
    x: &Coord,
) -> Result<f64> {
    debug_assert_eq!(sol.n(), dens.n());
    let key = match dens.key_of(x) {
        Some(k) => k,
        None => return Ok(1.0),
    };
    let f = dens.mass_by_key(key);
    if f > 0.0 {
        Ok((sol.rtilde_by_key(key) / f).clamp(0.0, 1.0))
    } else {
        Ok(1.0)
    }
}

/// `P[T_n < y]` from an `(n+1)`-layer confined DP; 0 for `y <= 0`.
pub fn barrier_cdf_exact(dist: &LatticeStepDistribution, n: u32, y: &Coord) -> Result<f64> {
    let sol = rtilde_exact(dist, n, y)?;
    Ok(sol.layer_total(n))
}

/// `P[max_{0 <= j <= n-1} |S_j| < u | S_n = 0]`: a DP confined to `(-u, u)`
/// through step `n-1`, one unconstrained step to 0, divided by `f_n(0)`.
/// Returns 1 by convention when `f_n(0) = 0`.
pub fn two_sided_exact(dist: &LatticeStepDistribution, n: u32, u: &Coord) -> Result<f64> {
    use num::Signed;
    if !u.is_positive() {
        return Err(Error::PreconditionViolated("u must be positive".into()));
    }
    if n < 1 {
        return Err(Error::PreconditionViolated("n must be >= 1".into()));
    }
    let lattice = dist.lattice();
    let atoms = dist.atoms();
    let a_lo = dist.min_key();
    let a_hi = dist.max_key();
    let neg_u = -u.clone();

    let mut cur = Row {
        lo: 0,
        mass: vec![1.0],
    };
    for k in 1..n {
        let lo = cur.lo + a_lo;
        let len = cur.mass.len() + (a_hi - a_lo) as usize;
        if len > DEFAULT_KEY_CAP {
            return Err(Error::SizeOverflow {
                needed: len as u64,
                cap: DEFAULT_KEY_CAP as u64,
            });
        }
        let mut full = vec![0.0f64; len];
        for (i, &m) in cur.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for a in atoms {
                full[i + (a.key - a_lo) as usize] += m * a.prob;
            }
        }
        // Keep keys with -u < value < u.
        let hi_cut = lattice.first_key_at_or_above(k, u);
        let lo_cut = lattice.last_key_at_or_below(k, &neg_u);
        let start = ((lo_cut + 1 - lo).max(0) as usize).min(full.len());
        let end = ((hi_cut - lo).max(0) as usize).min(full.len());
        cur = Row {
            lo: lo + start as i64,
            mass: full[start..end].to_vec(),
        };
        if cur.mass.is_empty() {
            return Ok(0.0);
        }
    }

    let zero_key = match lattice.key_of(n, &Coord::from_integer(0.into())) {
        Some(k) => k,
        None => return Ok(1.0),
    };
    let numer: f64 = atoms.iter().map(|a| a.prob * cur.get(zero_key - a.key)).sum();
    let denom = exact_density(dist, n, 0.0)?.mass_by_key(zero_key);
    if denom > 0.0 {
        Ok((numer / denom).clamp(0.0, 1.0))
    } else {
        Ok(1.0)
    }
}

/// Residual of the upward recursion
/// `Rtilde_n(y+s, y) = sum_{t > 0} f(s+t) Rtilde_{n-1}(y-t, y)`.
pub fn check_recur1(
    dist: &LatticeStepDistribution,
    n: u32,
    y: &Coord,
    s: &Coord,
) -> Result<f64> {
    let sol = rtilde_exact(dist, n, y)?;
    recur1_residual(&sol, s)
}

/// Same residual from a prebuilt solution (must have been built for the
/// same `y` with `n >= 2` layers).
pub fn recur1_residual(sol: &BarrierSolution, s: &Coord) -> Result<f64> {
    use num::Signed;
    let n = sol.n();
    if n < 2 {
        return Err(Error::PreconditionViolated("recursion needs n >= 2".into()));
    }
    if !sol.y.is_positive() {
        return Err(Error::PreconditionViolated("recursion needs y > 0".into()));
    }
    if s.is_negative() {
        return Err(Error::PreconditionViolated("s must be >= 0".into()));
    }
    let lattice = sol.dist.lattice();
    let target = &sol.y + s;
    let k_ys = lattice.require_key(n, &target)?;
    let lhs = sol.rtilde_step_by_key(n, k_ys);
    // Steps with value strictly above s: the walk was below y, so the last
    // step X_n = s + t needs t > 0.
    let j_min = lattice.first_key_above(1, s);
    let mut rhs = 0.0f64;
    for a in sol.dist.atoms() {
        if a.key < j_min {
            continue;
        }
        rhs += a.prob * sol.rtilde_step_by_key(n - 1, k_ys - a.key);
    }
    Ok((lhs - rhs).abs())
}

/// Prebuilt state for the downward recursion check: one layered solution
/// plus the density tables `f_1..f_n`. Immutable after construction, safe
/// for concurrent reads.
pub struct Recur2Context {
    sol: BarrierSolution,
    densities: Vec<DensityTable>,
}

impl Recur2Context {
    pub fn new(dist: &LatticeStepDistribution, n: u32, y: &Coord) -> Result<Self> {
        use num::Signed;
        if n < 2 {
            return Err(Error::PreconditionViolated("recursion needs n >= 2".into()));
        }
        if !y.is_positive() {
            return Err(Error::PreconditionViolated("recursion needs y > 0".into()));
        }
        let sol = rtilde_exact(dist, n, y)?;
        let densities = (1..=n)
            .map(|k| exact_density(dist, k, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Recur2Context { sol, densities })
    }

    pub fn solution(&self) -> &BarrierSolution {
        &self.sol
    }

    /// Fault-injection passthrough for the verification suite.
    pub fn perturb(&mut self, eps: f64) {
        self.sol.perturb_largest_final_mass(eps);
    }

    /// Residual of the reflection-motivated identity
    /// `Rtilde_n(x,y) = f_n(x) - f_n(y+a) + Rtilde_n(y+a,y)
    ///   + sum_{k=1}^{n-1} sum_{xi >= 0} Rtilde_k(y+xi,y)
    ///     (f_{n-k}(a-xi) - f_{n-k}(x-y-xi))`.
    pub fn residual(&self, x: &Coord, a: &Coord) -> Result<f64> {
        use num::Signed;
        if a.is_negative() {
            return Err(Error::PreconditionViolated("a must be >= 0".into()));
        }
        let n = self.sol.n();
        let lattice = self.sol.dist.lattice();
        let k_x = lattice.require_key(n, x)?;
        let shifted = &self.sol.y + a;
        let k_ya = lattice.require_key(n, &shifted)?;

        let lhs = self.sol.rtilde_by_key(k_x);
        let f_n = &self.densities[(n - 1) as usize];
        let mut rhs =
            f_n.mass_by_key(k_x) - f_n.mass_by_key(k_ya) + self.sol.rtilde_by_key(k_ya);
        // In key space, a - xi sits at key k_ya - m of L_{n-k} and
        // x - y - xi at key k_x - m, where m is the crossing key on L_k.
        for k in 1..n {
            let f_rest = &self.densities[(n - k - 1) as usize];
            for (m, w) in self.sol.crossing_masses(k) {
                if w == 0.0 {
                    continue;
                }
                rhs += w * (f_rest.mass_by_key(k_ya - m) - f_rest.mass_by_key(k_x - m));
            }
        }
        Ok((lhs - rhs).abs())
    }
}

/// One-shot form of the downward recursion residual.
pub fn check_recur2(
    dist: &LatticeStepDistribution,
    n: u32,
    x: &Coord,
    y: &Coord,
    a: &Coord,
) -> Result<f64> {
    Recur2Context::new(dist, n, y)?.residual(x, a)
}

/// Partial sums of the overshoot moment series
/// `sum_{n <= N} sum_{xi >= 0} xi^{u-2} Rtilde_n(y + xi, y)`.
#[derive(Debug, Clone)]
pub struct OvershootSum {
    /// Partial sums at `n = 1..=N` (monotone nondecreasing).
    pub partial_sums: Vec<f64>,
    /// Contribution of the last horizon `n = N`.
    pub tail_increment: f64,
}

impl OvershootSum {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Completes the series under the observed `c * n^{-3/2}` increment
    /// decay: the missing tail is about `2 N * increment(N)`.
    pub fn extrapolated_limit(&self) -> f64 {
        self.total() + 2.0 * self.partial_sums.len() as f64 * self.tail_increment
    }
}

/// Sums `xi^{u-2}` over first-crossing events up to horizon `N`.
pub fn overshoot_moment_sum(
    dist: &LatticeStepDistribution,
    y: &Coord,
    u: f64,
    n_max: u32,
) -> Result<OvershootSum> {
    use num::Signed;
    if y.is_negative() {
        return Err(Error::NegativeArgument(rational_to_f64(y)));
    }
    if !(2.0..=4.0).contains(&u) {
        return Err(Error::PreconditionViolated(format!(
            "overshoot moment order must lie in [2, 4], got {u}"
        )));
    }
    if n_max < 1 {
        return Err(Error::PreconditionViolated("N must be >= 1".into()));
    }
    let power = u - 2.0;
    let sol = rtilde_exact(dist, n_max, y)?;
    let lattice = dist.lattice();
    let y_f = sol.y_f64();
    let mut partial_sums = Vec::with_capacity(n_max as usize);
    let mut acc = 0.0f64;
    let mut last = 0.0f64;
    for n in 1..=n_max {
        let mut inc = 0.0f64;
        for (m, w) in sol.crossing_masses(n) {
            if w == 0.0 {
                continue;
            }
            let xi = lattice.value_f64(n, m) - y_f;
            inc += xi.powf(power) * w;
        }
        acc += inc;
        partial_sums.push(acc);
        last = inc;
    }
    Ok(OvershootSum {
        partial_sums,
        tail_increment: last,
    })
}

/// Which rough upper envelope to divide by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoughBoundKind {
    /// `min(y+1, sqrt n) * min(z+1, sqrt n) / n^{3/2}`, valid for all
    /// `y, z >= 0`.
    SmallY,
    /// `min(z+1, sqrt n) / y^2`, valid for `n >= 3`, `y >= sqrt n`,
    /// `0 <= z <= y/2`.
    LargeY,
}

/// `Rtilde_n(y-z, y)` divided by the stated constant-free envelope.
pub fn rough_bound_ratio(
    dist: &LatticeStepDistribution,
    n: u32,
    y: &Coord,
    z: &Coord,
    kind: RoughBoundKind,
) -> Result<f64> {
    use num::Signed;
    if y.is_negative() || z.is_negative() {
        return Err(Error::PreconditionViolated("y and z must be >= 0".into()));
    }
    let nf = f64::from(n);
    let y_f = rational_to_f64(y);
    let z_f = rational_to_f64(z);
    let envelope = match kind {
        RoughBoundKind::SmallY => {
            (y_f + 1.0).min(nf.sqrt()) * (z_f + 1.0).min(nf.sqrt()) / nf.powf(1.5)
        }
        RoughBoundKind::LargeY => {
            let y_sq = y * y;
            if n < 3 || y_sq < Coord::from_integer(i64::from(n).into()) {
                return Err(Error::PreconditionViolated(
                    "the large-barrier envelope needs n >= 3 and y >= sqrt(n)".into(),
                ));
            }
            if &(z + z) > y {
                return Err(Error::PreconditionViolated(
                    "the large-barrier envelope needs z <= y/2".into(),
                ));
            }
            (z_f + 1.0).min(nf.sqrt()) / (y_f * y_f)
        }
    };
    let sol = rtilde_exact(dist, n, y)?;
    let x = y - z;
    Ok(sol.rtilde_at(&x) / envelope)
}

/// One `(n, y, z)` comparison record: exact value against the main term.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub y: f64,
    pub z: f64,
    pub x: f64,
    pub exact: f64,
    pub approx: f64,
    pub abs_err: f64,
    pub norm_err: f64,
    pub defect: f64,
}

pub const SWEEP_CSV_HEADER: &str = "n,y,z,x,exact,approx,abs_err,norm_err,defect";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            sig17(self.y),
            sig17(self.z),
            sig17(self.x),
            sig17(self.exact),
            sig17(self.approx),
            sig17(self.abs_err),
            sig17(self.norm_err),
            sig17(self.defect)
        )
    }
}

/// Computes one sweep row: exact DP value, main term, absolute and
/// normalized error (`abs_err * n / (y + z + 1)`), combined defect.
pub fn sweep_row(
    dist: &LatticeStepDistribution,
    n: u32,
    y: &Coord,
    z: &Coord,
    trunc_eps: f64,
) -> Result<SweepRow> {
    use num::Signed;
    if y.is_negative() || z.is_negative() {
        return Err(Error::PreconditionViolated("y and z must be >= 0".into()));
    }
    let x = y - z;
    let sol = rtilde_exact(dist, n, y)?;
    let dens = exact_density(dist, n, trunc_eps)?;
    let exact = conditional_from(&sol, &dens, &x)?;
    let y_f = rational_to_f64(y);
    let z_f = rational_to_f64(z);
    let approx = theorem1_approx(n, y_f, z_f);
    let abs_err = (exact - approx).abs();
    Ok(SweepRow {
        n,
        y: y_f,
        z: z_f,
        x: rational_to_f64(&x),
        exact,
        approx,
        abs_err,
        norm_err: abs_err * f64::from(n) / (y_f + z_f + 1.0),
        defect: sol.defect() + dens.defect(),
    })
}

/// Computes many sweep rows concurrently; the output preserves input order.
pub fn sweep_rows(
    dist: &LatticeStepDistribution,
    points: &[(u32, Coord, Coord)],
    trunc_eps: f64,
) -> Result<Vec<SweepRow>> {
    points
        .par_iter()
        .map(|(n, y, z)| sweep_row(dist, *n, y, z, trunc_eps))
        .collect()
}
