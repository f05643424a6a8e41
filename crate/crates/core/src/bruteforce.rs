//! Brute-force reference implementations: exhaustive path enumeration over
//! `atom_count^n` walks. Exponential cost, usable only at toy sizes, and
//! deliberately independent of the DP code paths it is used to check.

use crate::distributions::LatticeStepDistribution;
use crate::lattice::Coord;
use num::Signed;
use std::collections::BTreeMap;

/// `Rtilde_n(x, y)` for every reachable final key, by walking all
/// `atom_count^n` paths.
pub fn enumerate_rtilde(
    dist: &LatticeStepDistribution,
    n: u32,
    y: &Coord,
) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    if !y.is_positive() {
        return out;
    }
    let lattice = dist.lattice();
    let atoms = dist.atoms();
    // First key of L_k at or above the barrier, for each layer.
    let cuts: Vec<i64> = (0..=n).map(|k| lattice.first_key_at_or_above(k, y)).collect();

    let mut choice = vec![0usize; n as usize];
    loop {
        let mut key = 0i64;
        let mut prob = 1.0f64;
        let mut below = true;
        for (j, &c) in choice.iter().enumerate() {
            let a = &atoms[c];
            key += a.key;
            prob *= a.prob;
            // The barrier constrains steps 1..n-1 only.
            if j + 1 < n as usize && key >= cuts[j + 1] {
                below = false;
            }
        }
        if below {
            *out.entry(key).or_insert(0.0) += prob;
        }
        // Odometer over atom choices.
        let mut pos = 0usize;
        loop {
            if pos == choice.len() {
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < atoms.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// `P[T_n <= h]` by exhaustive enumeration.
pub fn enumerate_tn_cdf(dist: &LatticeStepDistribution, n: u32, h: &Coord) -> f64 {
    if h.is_negative() {
        return 0.0;
    }
    let lattice = dist.lattice();
    let atoms = dist.atoms();
    let cuts: Vec<i64> = (0..=n).map(|k| lattice.last_key_at_or_below(k, h)).collect();

    let mut total = 0.0f64;
    let mut choice = vec![0usize; n as usize];
    loop {
        let mut key = 0i64;
        let mut prob = 1.0f64;
        let mut ok = true;
        for (j, &c) in choice.iter().enumerate() {
            let a = &atoms[c];
            key += a.key;
            prob *= a.prob;
            if key > cuts[j + 1] {
                ok = false;
            }
        }
        if ok {
            total += prob;
        }
        let mut pos = 0usize;
        loop {
            if pos == choice.len() {
                return total;
            }
            choice[pos] += 1;
            if choice[pos] < atoms.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
