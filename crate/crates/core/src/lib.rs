//! Numerical toolkit for barrier-avoidance probabilities of mean-zero,
//! variance-one lattice random walks.
//!
//! The central quantity is `R_n(x, y) = P[T_{n-1} < y | S_n = x]`, the chance
//! that a walk stays strictly below the barrier `y` through step `n - 1`
//! given that it ends at `x`. The crate computes it exactly by confined-walk
//! dynamic programming, evaluates the matching closed forms and asymptotic
//! main terms, and cross-checks everything with seeded Monte Carlo.

pub mod asymptotics;
pub mod barrier;
pub mod density;
pub mod distributions;
mod error;
pub mod lattice;
pub mod montecarlo;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{coord, coord_ratio, parse_coord, Coord, Lattice};

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    #[test]
    fn sig17_round_trips() {
        for &v in &[
            0.3333333333333333,
            1.0 - (-0.5f64).exp(),
            6.02e23,
            -1.2345678901234567e-11,
            0.0,
        ] {
            let s = super::sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }
}
