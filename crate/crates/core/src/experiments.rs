//! Parameter sweeps over generated populations.
//!
//! Each sweep point generates an instance from a template [`InstanceSpec`],
//! runs best-response learning and records the equilibrium next to the
//! homogeneous-model prediction for the realized average benefit. Points
//! run in parallel; rows are always returned sorted by
//! `(parameter, series, seed)`.

use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;

use crate::analytic::homogeneous_equilibrium;
use crate::dynamics::{iterate_to_equilibrium, verify_nash_with_status, LearningConfig, PeerStatus};
use crate::error::{Error, Result};
use crate::model::BenefitMatrix;
use crate::synth::{stream_rng, Instance, InstanceSpec, SELECTION_STREAM};

/// Runs whose final mean contribution falls below this count as collapsed.
pub const COLLAPSE_THRESHOLD: f64 = 1e-3;

/// Column names of the sweep CSV, in order.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "parameter",
    "series",
    "realized_b_av",
    "mean_contribution",
    "iterations",
    "converged",
    "homogeneous_prediction",
    "nash_max_gain",
    "seed",
];

/// Shared settings for every experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Population template; `target_b_av` is overridden by sweeps over
    /// benefit, and `seed` is the first of `repeats` consecutive seeds.
    pub template: InstanceSpec,
    pub learning: LearningConfig,
    pub repeats: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            template: InstanceSpec::default(),
            learning: LearningConfig::default(),
            repeats: 5,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.template.validate()?;
        self.learning.validate()?;
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(|r| self.template.seed.wrapping_add(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// The independent variable (average benefit, alive fraction, frozen
    /// fraction, ...).
    pub parameter: f64,
    /// Secondary key distinguishing curves, such as the frozen value.
    pub series: Option<f64>,
    /// Average total benefit actually present among participating peers.
    pub realized_b_av: f64,
    /// Mean equilibrium contribution over participating peers.
    pub mean_contribution: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `d_hi` of the homogeneous system at `realized_b_av`, zero when no
    /// equilibrium exists.
    pub homogeneous_prediction: f64,
    /// Largest unilateral gain available to any active peer at the end.
    pub nash_max_gain: f64,
    pub seed: u64,
}

impl SweepRow {
    pub fn collapsed(&self) -> bool {
        self.mean_contribution < COLLAPSE_THRESHOLD
    }
}

/// Mean and sample standard deviation over the seeds of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub parameter: f64,
    pub series: Option<f64>,
    pub mean_contribution: f64,
    pub std_contribution: f64,
    pub mean_iterations: f64,
    pub homogeneous_prediction: f64,
    pub runs: usize,
    pub converged_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    fn from_rows(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| {
            a.parameter
                .total_cmp(&b.parameter)
                .then_with(|| {
                    a.series
                        .unwrap_or(f64::NEG_INFINITY)
                        .total_cmp(&b.series.unwrap_or(f64::NEG_INFINITY))
                })
                .then_with(|| a.seed.cmp(&b.seed))
        });
        Self { rows }
    }

    /// Groups rows by `(parameter, series)`, preserving sort order.
    pub fn summarize(&self) -> Vec<PointSummary> {
        let mut out: Vec<PointSummary> = Vec::new();
        let mut start = 0;
        while start < self.rows.len() {
            let key = (self.rows[start].parameter, self.rows[start].series);
            let end = self.rows[start..]
                .iter()
                .position(|r| (r.parameter, r.series) != key)
                .map_or(self.rows.len(), |k| start + k);
            let group = &self.rows[start..end];
            let k = group.len() as f64;
            let mean = group.iter().map(|r| r.mean_contribution).sum::<f64>() / k;
            let var = if group.len() > 1 {
                group
                    .iter()
                    .map(|r| (r.mean_contribution - mean).powi(2))
                    .sum::<f64>()
                    / (k - 1.0)
            } else {
                0.0
            };
            out.push(PointSummary {
                parameter: key.0,
                series: key.1,
                mean_contribution: mean,
                std_contribution: var.sqrt(),
                mean_iterations: group.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
                homogeneous_prediction: group.iter().map(|r| r.homogeneous_prediction).sum::<f64>() / k,
                runs: group.len(),
                converged_runs: group.iter().filter(|r| r.converged).count(),
            });
            start = end;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SWEEP_COLUMNS)?;
        for r in &self.rows {
            out.write_record([
                r.parameter.to_string(),
                r.series.map(|s| s.to_string()).unwrap_or_default(),
                r.realized_b_av.to_string(),
                r.mean_contribution.to_string(),
                r.iterations.to_string(),
                r.converged.to_string(),
                r.homogeneous_prediction.to_string(),
                r.nash_max_gain.to_string(),
                r.seed.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `d_hi` of the homogeneous system with total benefit `b_total`, or zero
/// below the critical benefit.
pub fn homogeneous_prediction(b_total: f64, alpha: f64) -> f64 {
    if b_total.is_nan() || b_total <= 0.0 {
        return 0.0;
    }
    homogeneous_equilibrium(b_total, alpha)
        .map(|p| p.stable())
        .unwrap_or(0.0)
}

/// Average over present peers of their total benefit from other present
/// peers.
pub fn realized_benefit(b: &BenefitMatrix, status: &[PeerStatus]) -> f64 {
    let present: Vec<usize> = (0..b.n()).filter(|&i| status[i].is_present()).collect();
    if present.is_empty() {
        return 0.0;
    }
    let total: f64 = present
        .iter()
        .map(|&i| {
            b.row(i)
                .filter(|&(j, _)| status[j].is_present())
                .map(|(_, v)| v)
                .sum::<f64>()
        })
        .sum();
    total / present.len() as f64
}

/// Rounds an iteration count the homogeneous map would need: the distance
/// to `d_hi` shrinks by `λ = (d_hi + 1) / (2 d_hi)` per round.
pub fn predicted_iterations(b_total: f64, initial: f64, tolerance: f64) -> Option<f64> {
    let pair = homogeneous_equilibrium(b_total, 1.0).ok()?;
    if !pair.exists || pair.d_hi == 1.0 {
        return None;
    }
    let lambda = (pair.d_hi + 1.0) / (2.0 * pair.d_hi);
    let error = (initial - pair.d_hi).abs();
    if error <= tolerance {
        return Some(0.0);
    }
    Some((tolerance / error).ln() / lambda.ln())
}

fn run_point(
    instance: &Instance,
    status: &[PeerStatus],
    learning: &LearningConfig,
    parameter: f64,
    series: Option<f64>,
) -> Result<SweepRow> {
    let record = iterate_to_equilibrium(&instance.matrix, &instance.initial, status, learning)?;
    let curve = learning.curve()?;
    let report = verify_nash_with_status(&instance.matrix, &record.final_profile, status, &curve)?;
    let realized = realized_benefit(&instance.matrix, status);
    Ok(SweepRow {
        parameter,
        series,
        realized_b_av: realized,
        mean_contribution: record.final_mean(),
        iterations: record.iterations,
        converged: record.converged,
        homogeneous_prediction: homogeneous_prediction(realized, learning.alpha),
        nash_max_gain: report.max_gain,
        seed: instance.seed,
    })
}

fn check_values(name: &str, values: &[f64], ok: impl Fn(f64) -> bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name}: no values given")));
    }
    if let Some(v) = values.iter().find(|&&v| !ok(v)) {
        return Err(Error::Config(format!("{name}: value {v} out of range")));
    }
    Ok(())
}

fn pick(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, SELECTION_STREAM);
    let mut chosen = index::sample(&mut rng, n, count).into_vec();
    chosen.sort_unstable();
    chosen
}

/// Equilibrium mean contribution against average benefit.
pub fn benefit_sweep(cfg: &ExperimentConfig, b_av_values: &[f64]) -> Result<SweepResult> {
    cfg.validate()?;
    check_values("b_av", b_av_values, |v| v.is_finite() && v > 0.0)?;
    let jobs: Vec<(f64, u64)> = b_av_values
        .iter()
        .flat_map(|&b| cfg.seeds().map(move |s| (b, s)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(b_av, seed)| {
            let spec = InstanceSpec {
                target_b_av: b_av,
                seed,
                ..cfg.template
            };
            let instance = Instance::generate(&spec)?;
            let status = vec![PeerStatus::Active; spec.n];
            run_point(&instance, &status, &cfg.learning, b_av, None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Iterations needed to converge against average benefit. The rows are
/// those of [`benefit_sweep`]; the `iterations` column is the quantity of
/// interest.
pub fn convergence_profile(cfg: &ExperimentConfig, b_av_values: &[f64]) -> Result<SweepResult> {
    benefit_sweep(cfg, b_av_values)
}

/// Removes a random `1 - f` share of the peers before learning starts and
/// records the survivors' equilibrium for each alive fraction `f`.
pub fn churn_experiment(cfg: &ExperimentConfig, alive_fractions: &[f64]) -> Result<SweepResult> {
    cfg.validate()?;
    check_values("alive fraction", alive_fractions, |f| f > 0.0 && f <= 1.0)?;
    let n = cfg.template.n;
    let jobs: Vec<(f64, u64)> = alive_fractions
        .iter()
        .flat_map(|&f| cfg.seeds().map(move |s| (f, s)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(fraction, seed)| {
            let instance = Instance::generate(&cfg.template.with_seed(seed))?;
            let removed = ((1.0 - fraction) * n as f64).round() as usize;
            let mut status = vec![PeerStatus::Active; n];
            for i in pick(n, removed.min(n - 1), seed) {
                status[i] = PeerStatus::Removed;
            }
            run_point(&instance, &status, &cfg.learning, fraction, None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Freezes a random share of the peers at a constant contribution and lets
/// the rest learn. The reported mean includes the frozen peers. For a given
/// seed and fraction the same peers are frozen whatever the value.
pub fn freeze_experiment(
    cfg: &ExperimentConfig,
    frozen_fractions: &[f64],
    frozen_values: &[f64],
) -> Result<SweepResult> {
    cfg.validate()?;
    check_values("frozen fraction", frozen_fractions, |f| (0.0..=1.0).contains(&f))?;
    check_values("frozen value", frozen_values, |v| v.is_finite() && v >= 0.0)?;
    let n = cfg.template.n;
    let jobs: Vec<(f64, f64, u64)> = frozen_fractions
        .iter()
        .flat_map(|&f| {
            frozen_values
                .iter()
                .flat_map(move |&v| cfg.seeds().map(move |s| (f, v, s)))
        })
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(fraction, value, seed)| {
            let instance = Instance::generate(&cfg.template.with_seed(seed))?;
            let frozen = (fraction * n as f64).round() as usize;
            let mut status = vec![PeerStatus::Active; n];
            for i in pick(n, frozen.min(n), seed) {
                status[i] = PeerStatus::Frozen(value);
            }
            run_point(&instance, &status, &cfg.learning, fraction, Some(value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub mean: f64,
}

impl Histogram {
    /// Bins `values` into `bins` equal-width bins over their range. When all
    /// values coincide a single bin holds everything.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("bin count must be at least 1".into()));
        }
        if values.is_empty() {
            return Ok(Self {
                lo: 0.0,
                hi: 0.0,
                counts: vec![0],
                mean: 0.0,
            });
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            return Ok(Self {
                lo,
                hi,
                counts: vec![values.len()],
                mean,
            });
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in values {
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Self { lo, hi, counts, mean })
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    /// `(lower edge, upper edge, count)` for every bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        let w = self.bin_width();
        self.counts.iter().enumerate().map(move |(k, &c)| {
            let upper = if k + 1 == self.counts.len() {
                self.hi
            } else {
                self.lo + (k + 1) as f64 * w
            };
            (self.lo + k as f64 * w, upper, c)
        })
    }

    /// True when the counts rise to a single peak and then fall, ignoring
    /// dips no larger than `slack` counts.
    pub fn is_unimodal(&self, slack: usize) -> bool {
        let peak = self
            .counts
            .iter()
            .enumerate()
            .max_by_key(|&(_, c)| *c)
            .map_or(0, |(k, _)| k);
        let rising = self.counts[..=peak]
            .windows(2)
            .all(|w| w[1] + slack >= w[0]);
        let falling = self.counts[peak..]
            .windows(2)
            .all(|w| w[0] + slack >= w[1]);
        rising && falling
    }
}

/// Distributions of nonzero benefits and of equilibrium contributions for
/// a single instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub benefit: Histogram,
    pub contribution: Histogram,
    /// `(1/N) Σ_ij b_ij`.
    pub realized_b_av: f64,
    pub homogeneous_prediction: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl HistogramReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["distribution", "bin_lo", "bin_hi", "count", "mean"])?;
        for (name, h) in [("benefit", &self.benefit), ("contribution", &self.contribution)] {
            for (lo, hi, c) in h.bins() {
                out.write_record([
                    name.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    c.to_string(),
                    h.mean.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn histogram_experiment(cfg: &ExperimentConfig, bins: usize) -> Result<HistogramReport> {
    cfg.validate()?;
    let instance = Instance::generate(&cfg.template)?;
    let status = vec![PeerStatus::Active; instance.n()];
    let record = iterate_to_equilibrium(&instance.matrix, &instance.initial, &status, &cfg.learning)?;
    let realized = instance.matrix.average_benefit();
    Ok(HistogramReport {
        benefit: Histogram::from_values(instance.matrix.values(), bins)?,
        contribution: Histogram::from_values(record.final_profile.as_slice(), bins)?,
        realized_b_av: realized,
        homogeneous_prediction: homogeneous_prediction(realized, cfg.learning.alpha),
        converged: record.converged,
        iterations: record.iterations,
    })
}
