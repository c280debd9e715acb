//! Best-response (Cournot) learning for heterogeneous populations.
//!
//! Every round each active peer computes the contribution that maximizes
//! its own utility given everyone's contribution from the previous round,
//! then all peers switch to their new values at once. Fixed points of this
//! map are Nash equilibria.

use rayon::prelude::*;

use crate::error::{check_positive, Error, Result};
use crate::model::{marginal_utility, utility_at, BenefitMatrix, ContributionProfile, ProbabilityCurve};

const BISECTION_MAX_STEPS: usize = 400;
const BRACKET_MAX_DOUBLINGS: usize = 2048;

/// Parameters of the learning process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningConfig {
    pub alpha: f64,
    /// Convergence threshold on the mean absolute contribution change per
    /// active peer between consecutive rounds.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            tolerance: 1e-6,
            max_iterations: 10_000,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("tolerance", self.tolerance)?;
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<ProbabilityCurve> {
        ProbabilityCurve::new(self.alpha)
    }
}

/// Role of a peer during learning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeerStatus {
    /// Plays best responses.
    Active,
    /// Left the system: contributes nothing and is ignored by others.
    Removed,
    /// Holds a fixed contribution whatever the incentives.
    Frozen(f64),
}

impl PeerStatus {
    pub fn is_active(self) -> bool {
        matches!(self, PeerStatus::Active)
    }

    pub fn is_present(self) -> bool {
        !matches!(self, PeerStatus::Removed)
    }
}

/// Outcome of [`iterate_to_equilibrium`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub iterations: usize,
    pub converged: bool,
    /// Mean contribution over present (non-removed) peers. Entry 0 is the
    /// starting profile, entry `k` the profile after round `k`.
    pub per_iteration_mean: Vec<f64>,
    pub final_profile: ContributionProfile,
    pub final_residual: f64,
}

impl TrajectoryRecord {
    /// Mean contribution over present peers at the end of the run.
    pub fn final_mean(&self) -> f64 {
        *self.per_iteration_mean.last().unwrap_or(&0.0)
    }
}

/// Contribution maximizing `-d + p(d) s` over `d >= 0`.
///
/// For `α = 1` this is `max(0, sqrt(s) - 1)`. Otherwise the largest root of
/// `s p'(d) = 1` is found by bisection; if there is none, or the utility
/// there is negative, the peer quits and the answer is zero.
pub fn best_response(curve: &ProbabilityCurve, s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain {
            name: "S",
            value: s,
            reason: "weighted contribution must be finite and nonnegative",
        });
    }
    Ok(best_response_unchecked(curve, s))
}

fn best_response_unchecked(curve: &ProbabilityCurve, s: f64) -> f64 {
    let alpha = curve.alpha();
    if s == 0.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        return (s.sqrt() - 1.0).max(0.0);
    }

    // p' is decreasing beyond its peak, so the stationarity condition has at
    // most one root there and it is a local maximum of the utility.
    let peak = if alpha > 1.0 {
        ((alpha - 1.0) / (alpha + 1.0)).powf(1.0 / alpha)
    } else {
        0.0
    };
    let slope = |d: f64| marginal_utility(curve, s, d);
    if alpha > 1.0 && slope(peak) <= 0.0 {
        return 0.0;
    }

    let mut hi = s.max(1.0).max(peak);
    let mut doublings = 0;
    while slope(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > BRACKET_MAX_DOUBLINGS || !hi.is_finite() {
            return 0.0;
        }
    }
    let mut lo = peak;
    for _ in 0..BISECTION_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever end of the final bracket sits closer to stationarity.
    let root = if lo > 0.0 && slope(lo).abs() < slope(hi).abs() {
        lo
    } else {
        hi
    };
    if !root.is_finite() || utility_at(curve, s, root) < 0.0 {
        0.0
    } else {
        root
    }
}

fn check_dims(b: &BenefitMatrix, d: &ContributionProfile, status: Option<&[PeerStatus]>) -> Result<()> {
    if d.len() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            actual: d.len(),
        });
    }
    if let Some(status) = status {
        if status.len() != b.n() {
            return Err(Error::DimensionMismatch {
                expected: b.n(),
                actual: status.len(),
            });
        }
    }
    Ok(())
}

fn present_mean(values: &[f64], status: &[PeerStatus]) -> f64 {
    let (sum, count) = values
        .iter()
        .zip(status)
        .filter(|(_, st)| st.is_present())
        .fold((0.0, 0usize), |(s, c), (v, _)| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Runs synchronous best-response rounds until the mean absolute change
/// over active peers drops below `cfg.tolerance`, or `cfg.max_iterations`
/// rounds have been played.
///
/// Removed peers are pinned at zero, so they drop out of every other
/// peer's weighted sum. Frozen peers hold their value throughout.
/// Non-convergence is reported in the record, not as an error.
pub fn iterate_to_equilibrium(
    b: &BenefitMatrix,
    d0: &ContributionProfile,
    status: &[PeerStatus],
    cfg: &LearningConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    check_dims(b, d0, Some(status))?;
    let curve = cfg.curve()?;
    for st in status {
        if let PeerStatus::Frozen(v) = *st {
            crate::error::check_nonnegative("frozen contribution", v)?;
        }
    }

    let mut current: Vec<f64> = d0
        .as_slice()
        .iter()
        .zip(status)
        .map(|(&d, st)| match *st {
            PeerStatus::Active => d,
            PeerStatus::Removed => 0.0,
            PeerStatus::Frozen(v) => v,
        })
        .collect();
    let mut next = vec![0.0; current.len()];
    let active = status.iter().filter(|st| st.is_active()).count();

    let mut means = vec![present_mean(&current, status)];
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        next.par_iter_mut().enumerate().for_each(|(i, out)| {
            *out = match status[i] {
                PeerStatus::Active => best_response_unchecked(&curve, b.weighted_sum(i, &current)),
                PeerStatus::Removed => 0.0,
                PeerStatus::Frozen(v) => v,
            };
        });
        if let Some(peer) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure {
                iteration: iterations,
                peer,
            });
        }

        let total_change: f64 = next
            .iter()
            .zip(&current)
            .zip(status)
            .filter(|(_, st)| st.is_active())
            .map(|((n, c), _)| (n - c).abs())
            .sum();
        residual = if active == 0 {
            0.0
        } else {
            total_change / active as f64
        };
        std::mem::swap(&mut current, &mut next);
        means.push(present_mean(&current, status));

        if residual < cfg.tolerance {
            converged = true;
            break;
        }
    }

    Ok(TrajectoryRecord {
        iterations,
        converged,
        per_iteration_mean: means,
        final_profile: ContributionProfile::new(current)?,
        final_residual: residual,
    })
}

/// Largest utility gain any single peer could obtain by deviating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NashReport {
    pub max_gain: f64,
    pub worst_peer: usize,
}

impl NashReport {
    pub fn is_equilibrium(&self, tol: f64) -> bool {
        self.max_gain < tol
    }
}

/// Checks every peer against its best unilateral deviation.
pub fn verify_nash(
    b: &BenefitMatrix,
    d: &ContributionProfile,
    curve: &ProbabilityCurve,
) -> Result<NashReport> {
    let status = vec![PeerStatus::Active; b.n()];
    verify_nash_with_status(b, d, &status, curve)
}

/// Like [`verify_nash`] but only active peers are considered players;
/// frozen and removed peers are part of the environment.
pub fn verify_nash_with_status(
    b: &BenefitMatrix,
    d: &ContributionProfile,
    status: &[PeerStatus],
    curve: &ProbabilityCurve,
) -> Result<NashReport> {
    check_dims(b, d, Some(status))?;
    let values = d.as_slice();
    let mut report = NashReport {
        max_gain: 0.0,
        worst_peer: 0,
    };
    for (i, st) in status.iter().enumerate() {
        if !st.is_active() {
            continue;
        }
        let s = b.weighted_sum(i, values);
        let current = if values[i] == 0.0 {
            0.0
        } else {
            utility_at(curve, s, values[i])
        };
        let deviation = best_response(curve, s)?;
        let best = if deviation == 0.0 {
            0.0
        } else {
            utility_at(curve, s, deviation)
        };
        let gain = (best - current).max(0.0);
        if gain > report.max_gain {
            report = NashReport {
                max_gain: gain,
                worst_peer: i,
            };
        }
    }
    Ok(report)
}
