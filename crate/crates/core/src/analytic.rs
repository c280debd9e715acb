//! Closed-form results for homogeneous peers.
//!
//! With `b_ij = b` for every pair, an `N`-peer system behaves like a
//! two-player game with total benefit `b_total = b (N - 1)`. Writing
//! `x = d^α`, a symmetric equilibrium solves
//!
//! ```text
//! x^2 - (b_total α - 2) x + 1 = 0
//! ```
//!
//! so equilibria exist only when `b_total α >= 4`, and the two roots satisfy
//! `x_lo x_hi = 1`.

use crate::error::{check_nonnegative, check_positive, Error, Result};

/// Discriminant magnitude treated as exactly zero at the critical point.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

const FIXED_POINT_DAMPING: f64 = 0.5;
const FIXED_POINT_TOLERANCE: f64 = 1e-12;
const FIXED_POINT_MAX_ITERATIONS: usize = 1_000_000;
const COLLAPSE_THRESHOLD: f64 = 1e-9;

/// The symmetric equilibria `d_lo <= d_hi` of the homogeneous game.
///
/// When `exists` is false both roots are reported as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPair {
    pub exists: bool,
    pub d_lo: f64,
    pub d_hi: f64,
}

impl EquilibriumPair {
    pub fn none() -> Self {
        Self {
            exists: false,
            d_lo: 0.0,
            d_hi: 0.0,
        }
    }

    /// The high (stable) root, or zero when there is no equilibrium.
    pub fn stable(&self) -> f64 {
        if self.exists {
            self.d_hi
        } else {
            0.0
        }
    }
}

/// Total benefit below which staying out of the system is the only
/// rational choice.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CriticalBenefit(pub f64);

impl CriticalBenefit {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `b_c = 4 / α`.
pub fn critical_benefit(alpha: f64) -> Result<CriticalBenefit> {
    check_positive("alpha", alpha)?;
    Ok(CriticalBenefit(4.0 / alpha))
}

/// Best response for `α = 1`: `max(0, sqrt(b_total d_other) - 1)`.
pub fn reaction(b_total: f64, d_other: f64) -> Result<f64> {
    check_nonnegative("b_total", b_total)?;
    check_nonnegative("d_other", d_other)?;
    Ok(reaction_unchecked(b_total, d_other))
}

fn reaction_unchecked(b_total: f64, d_other: f64) -> f64 {
    ((b_total * d_other).sqrt() - 1.0).max(0.0)
}

/// Symmetric equilibria of the homogeneous game with total benefit
/// `b_total` (that is `b (N - 1)` for `N` peers) and curve exponent `alpha`.
pub fn homogeneous_equilibrium(b_total: f64, alpha: f64) -> Result<EquilibriumPair> {
    check_positive("b_total", b_total)?;
    check_positive("alpha", alpha)?;

    let half = b_total * alpha / 2.0 - 1.0;
    let mut disc = half * half - 1.0;
    if half < 0.0 || disc < -CRITICAL_TOLERANCE {
        return Ok(EquilibriumPair::none());
    }
    if disc < CRITICAL_TOLERANCE {
        disc = 0.0;
    }
    // Roots of the quadratic in x = d^α; the low root is taken as the
    // reciprocal of the high one to avoid cancellation.
    let x_hi = half + disc.sqrt();
    let x_lo = 1.0 / x_hi;
    let (d_lo, d_hi) = if alpha == 1.0 {
        (x_lo, x_hi)
    } else {
        (x_lo.powf(1.0 / alpha), x_hi.powf(1.0 / alpha))
    };
    Ok(EquilibriumPair {
        exists: true,
        d_lo,
        d_hi,
    })
}

/// Largest eigenvalue magnitude of the `α = 1` best-response map linearized
/// at the fixed point `(d1, d2)`.
///
/// Below one the fixed point attracts, above one it repels, and exactly one
/// is neutral.
pub fn stability_eigenvalue(d1_star: f64, d2_star: f64) -> Result<f64> {
    check_positive("d1_star", d1_star)?;
    check_positive("d2_star", d2_star)?;
    Ok(((d1_star + 1.0) * (d2_star + 1.0) / (4.0 * d1_star * d2_star)).sqrt())
}

/// Stable fixed point of the asymmetric two-player game at `α = 1`:
///
/// ```text
/// d1 = sqrt(b12 d2) - 1,   d2 = sqrt(b21 d1) - 1
/// ```
///
/// Runs damped simultaneous best responses starting from `b12 b21`, well
/// above any unstable root. Returns `None` when the iteration collapses to
/// zero.
pub fn two_player_fixed_point(b12: f64, b21: f64) -> Result<Option<(f64, f64)>> {
    check_positive("b12", b12)?;
    check_positive("b21", b21)?;

    let start = (b12 * b21).max(1.0);
    let (mut d1, mut d2) = (start, start);
    for _ in 0..FIXED_POINT_MAX_ITERATIONS {
        let t1 = reaction_unchecked(b12, d2);
        let t2 = reaction_unchecked(b21, d1);
        if t1 == 0.0 && t2 == 0.0 {
            // Both peers quit; the map is monotone so nothing comes back.
            return Ok(None);
        }
        let n1 = d1 + FIXED_POINT_DAMPING * (t1 - d1);
        let n2 = d2 + FIXED_POINT_DAMPING * (t2 - d2);
        let change = (n1 - d1).abs().max((n2 - d2).abs());
        d1 = n1;
        d2 = n2;
        if change < FIXED_POINT_TOLERANCE {
            if d1.max(d2) < COLLAPSE_THRESHOLD {
                return Ok(None);
            }
            return Ok(Some((d1, d2)));
        }
    }
    let residual = (d1 - reaction_unchecked(b12, d2))
        .abs()
        .max((d2 - reaction_unchecked(b21, d1)).abs());
    Err(Error::NonConvergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        residual,
        last: vec![d1, d2],
    })
}
