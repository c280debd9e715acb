//! End-to-end acceptance checks. Runs without the libtest harness so every
//! check prints a PASS/FAIL line; the process fails if any check fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use diffserv::analytic::{critical_benefit, homogeneous_equilibrium, stability_eigenvalue};
use diffserv::dynamics::best_response;
use diffserv::experiments::{
    benefit_sweep, churn_experiment, freeze_experiment, ExperimentConfig, SweepResult,
};
use diffserv::model::{
    marginal_utility, utility, utility_at, utility_gradient, BenefitMatrix, ContributionProfile,
    ProbabilityCurve,
};
use diffserv::synth::{stream_rng, InstanceSpec};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn config(n: usize, b_av: f64) -> ExperimentConfig {
    ExperimentConfig {
        template: InstanceSpec {
            n,
            target_b_av: b_av,
            ..InstanceSpec::default()
        },
        ..ExperimentConfig::default()
    }
}

fn means_by_parameter(result: &SweepResult) -> Vec<(f64, f64)> {
    result
        .summarize()
        .iter()
        .map(|p| (p.parameter, p.mean_contribution))
        .collect()
}

fn critical_benefit_threshold() -> Outcome {
    let below = homogeneous_equilibrium(3.999, 1.0).map_err(|e| e.to_string())?;
    ensure!(!below.exists, "equilibrium reported at b = 3.999");
    let above = homogeneous_equilibrium(4.001, 1.0).map_err(|e| e.to_string())?;
    ensure!(above.exists && above.d_lo < above.d_hi, "no valid pair at b = 4.001: {above:?}");
    let at = homogeneous_equilibrium(4.0, 1.0).map_err(|e| e.to_string())?;
    ensure!(
        at.exists && (at.d_lo - 1.0).abs() < 1e-6 && (at.d_hi - 1.0).abs() < 1e-6,
        "b = 4 gives {at:?}"
    );
    let b_c = critical_benefit(1.0).map_err(|e| e.to_string())?.value();
    ensure!(b_c == 4.0, "b_c = {b_c}");
    Ok(format!("b_c = {b_c}, roots at b = 4: ({}, {})", at.d_lo, at.d_hi))
}

fn sweep_points() -> impl Iterator<Item = f64> {
    (1..=100).map(|k| 4.0 + 16.0 * k as f64 / 100.0)
}

fn exact_roots() -> Outcome {
    let pair = homogeneous_equilibrium(4.5, 1.0).map_err(|e| e.to_string())?;
    ensure!(
        (pair.d_lo - 0.5).abs() < 1e-12 && (pair.d_hi - 2.0).abs() < 1e-12,
        "b = 4.5 gives ({}, {})",
        pair.d_lo,
        pair.d_hi
    );
    let mut worst: f64 = 0.0;
    for b in sweep_points() {
        let p = homogeneous_equilibrium(b, 1.0).map_err(|e| e.to_string())?;
        worst = worst.max((p.d_lo * p.d_hi - 1.0).abs());
    }
    ensure!(worst < 1e-9, "root product off by {worst:e}");
    Ok(format!("max |d_lo d_hi - 1| = {worst:e} over 100 points"))
}

fn stability() -> Outcome {
    for b in sweep_points() {
        let p = homogeneous_equilibrium(b, 1.0).map_err(|e| e.to_string())?;
        let hi = stability_eigenvalue(p.d_hi, p.d_hi).map_err(|e| e.to_string())?;
        let lo = stability_eigenvalue(p.d_lo, p.d_lo).map_err(|e| e.to_string())?;
        ensure!(hi < 1.0, "b = {b}: lambda(d_hi) = {hi}");
        ensure!(lo > 1.0, "b = {b}: lambda(d_lo) = {lo}");
    }
    let p = homogeneous_equilibrium(4.0, 1.0).map_err(|e| e.to_string())?;
    let neutral = stability_eigenvalue(p.d_hi, p.d_hi).map_err(|e| e.to_string())?;
    ensure!((neutral - 1.0).abs() < 1e-9, "lambda at b = 4 is {neutral}");
    Ok(format!("lambda(d_hi) < 1 < lambda(d_lo) on 100 points, lambda at b = 4: {neutral}"))
}

fn heterogeneous_matches_homogeneous() -> Outcome {
    let result = benefit_sweep(&config(1000, 6.0), &[6.0]).map_err(|e| e.to_string())?;
    let rows = &result.rows;
    ensure!(rows.len() == 5, "expected 5 seeds, got {}", rows.len());
    let mean = rows.iter().map(|r| r.mean_contribution).sum::<f64>() / rows.len() as f64;
    let gain = rows.iter().map(|r| r.nash_max_gain).fold(0.0, f64::max);
    ensure!(rows.iter().all(|r| r.converged), "a seed did not converge");
    let gap = (mean - 3.732).abs() / 3.732;
    ensure!(gap < 0.05, "mean {mean} is {:.2}% from 3.732", 100.0 * gap);
    ensure!(gain < 1e-5, "max Nash gain {gain:e}");
    Ok(format!("mean {mean:.4} ({:.2}% from 3.732), max gain {gain:.1e}", 100.0 * gap))
}

fn size_independence() -> Outcome {
    let grid = [4.4, 5.0, 6.0, 8.0, 12.0];
    let small = benefit_sweep(&config(500, 6.0), &grid).map_err(|e| e.to_string())?;
    let large = benefit_sweep(&config(1000, 6.0), &grid).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for ((b, m500), (_, m1000)) in means_by_parameter(&small).into_iter().zip(means_by_parameter(&large)) {
        let gap = (m500 - m1000).abs() / m1000;
        ensure!(gap < 0.05, "b_av = {b}: n=500 {m500} vs n=1000 {m1000}");
        worst = worst.max(gap);
    }
    Ok(format!("worst pointwise gap {:.2}%", 100.0 * worst))
}

fn subcritical_collapse() -> Outcome {
    let result = benefit_sweep(&config(1000, 3.0), &[3.0]).map_err(|e| e.to_string())?;
    ensure!(result.rows.len() == 5, "expected 5 seeds");
    let worst = result.rows.iter().map(|r| r.mean_contribution).fold(0.0, f64::max);
    ensure!(worst < 1e-3, "largest final mean {worst}");
    Ok(format!("largest final mean over 5 seeds: {worst:e}"))
}

fn churn_robustness() -> Outcome {
    let result = churn_experiment(&config(1000, 12.0), &[0.28, 0.40]).map_err(|e| e.to_string())?;
    let at = |f: f64| result.rows.iter().filter(move |r| r.parameter == f);
    ensure!(
        at(0.40).all(|r| !r.collapsed()),
        "collapse at alive fraction 0.40: {:?}",
        at(0.40).map(|r| r.mean_contribution).collect::<Vec<_>>()
    );
    ensure!(
        at(0.28).all(|r| r.collapsed()),
        "survival at alive fraction 0.28: {:?}",
        at(0.28).map(|r| r.mean_contribution).collect::<Vec<_>>()
    );
    let survivors = at(0.40).map(|r| r.mean_contribution).fold(f64::INFINITY, f64::min);
    Ok(format!("all 5 seeds collapse at 0.28; smallest mean at 0.40 is {survivors:.4}"))
}

fn freeze_bias() -> Outcome {
    let cfg = config(1000, 6.0);
    let full = freeze_experiment(&cfg, &[1.0], &[0.5, 2.0]).map_err(|e| e.to_string())?;
    for r in &full.rows {
        let v = r.series.unwrap_or(f64::NAN);
        ensure!(r.mean_contribution == v, "all frozen at {v}: mean {}", r.mean_contribution);
    }
    let half = freeze_experiment(&cfg, &[0.5], &[0.5, 4.0]).map_err(|e| e.to_string())?;
    let mean_at = |v: f64| {
        let rows: Vec<_> = half.rows.iter().filter(|r| r.series == Some(v)).collect();
        rows.iter().map(|r| r.mean_contribution).sum::<f64>() / rows.len() as f64
    };
    let (low, high) = (mean_at(0.5), mean_at(4.0));
    ensure!(high > low, "frozen at 4.0 gives {high}, frozen at 0.5 gives {low}");
    Ok(format!("50% frozen: at 4.0 mean {high:.4} > at 0.5 mean {low:.4}"))
}

fn convergence_speed() -> Outcome {
    let result = benefit_sweep(&config(1000, 6.0), &[4.4, 6.0, 12.0]).map_err(|e| e.to_string())?;
    let iters = |b: f64, seed: u64| {
        result
            .rows
            .iter()
            .find(|r| r.parameter == b && r.seed == seed)
            .map(|r| r.iterations)
            .unwrap_or(0)
    };
    let mut summary = Vec::new();
    for seed in 0..5 {
        let (a, b, c) = (iters(4.4, seed), iters(6.0, seed), iters(12.0, seed));
        ensure!(a > b && b > c, "seed {seed}: iterations {a}, {b}, {c}");
        summary.push(format!("{a}>{b}>{c}"));
    }
    Ok(format!("iterations at 4.4/6/12 per seed: {}", summary.join(" ")))
}

/// Grid scan followed by golden-section refinement of `u(d)` on `[0, S]`.
fn golden_section_max(curve: &ProbabilityCurve, s: f64) -> (f64, f64) {
    let u = |d: f64| utility_at(curve, s, d);
    let hi = s.max(1.0);
    let steps = 4000;
    let h = hi / steps as f64;
    let best = (0..=steps)
        .map(|k| k as f64 * h)
        .fold(0.0, |b: f64, d| if u(d) > u(b) { d } else { b });
    let (mut a, mut b) = ((best - h).max(0.0), (best + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-13 * (1.0 + b) {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if u(c) >= u(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let d = 0.5 * (a + b);
    (d, u(d))
}

fn property_suite() -> Outcome {
    let mut rng = stream_rng(2024, 0);

    let mut worst_fd: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.random_range(0.5..4.0);
        let curve = ProbabilityCurve::new(alpha).map_err(|e| e.to_string())?;
        let b = BenefitMatrix::homogeneous(4, rng.random_range(0.5..5.0)).map_err(|e| e.to_string())?;
        let values: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..5.0)).collect();
        let i = rng.random_range(0..4);
        let profile = ContributionProfile::new(values.clone()).map_err(|e| e.to_string())?;
        let grad = utility_gradient(&curve, &b, &profile, i).map_err(|e| e.to_string())?;
        let h = 1e-5 * values[i];
        let at = |d: f64| {
            let mut v = values.clone();
            v[i] = d;
            utility(&curve, &b, &ContributionProfile::new(v).unwrap(), i).unwrap()
        };
        let fd = (at(values[i] + h) - at(values[i] - h)) / (2.0 * h);
        let scale = 1.0 + (grad + 1.0).abs();
        worst_fd = worst_fd.max((grad - fd).abs() / scale);
    }
    ensure!(worst_fd < 1e-6, "gradient vs finite difference: relative error {worst_fd:e}");

    let mut worst_stat: f64 = 0.0;
    for alpha in [0.5, 2.0, 4.0, 10.0] {
        let curve = ProbabilityCurve::new(alpha).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let s = rng.random_range(0.2..30.0);
            let d = best_response(&curve, s).map_err(|e| e.to_string())?;
            let (d_gs, u_gs) = golden_section_max(&curve, s);
            if u_gs <= 1e-12 {
                ensure!(d == 0.0, "alpha {alpha}, S {s}: oracle says quit, best response {d}");
                continue;
            }
            let residual = marginal_utility(&curve, s, d).abs();
            ensure!(residual < 1e-9, "alpha {alpha}, S {s}: stationarity residual {residual:e}");
            ensure!(
                (d - d_gs).abs() < 1e-5 * (1.0 + d_gs),
                "alpha {alpha}, S {s}: best response {d} vs oracle {d_gs}"
            );
            ensure!(utility_at(&curve, s, d) >= u_gs - 1e-12, "alpha {alpha}, S {s}: oracle beats best response");
            worst_stat = worst_stat.max(residual);
        }
    }

    let cfg = ExperimentConfig {
        template: InstanceSpec { n: 300, density: 0.05, ..InstanceSpec::default() },
        repeats: 2,
        ..ExperimentConfig::default()
    };
    let csv = |threads: usize| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let result = pool
            .install(|| benefit_sweep(&cfg, &[3.0, 6.0, 12.0]))
            .map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        result.write_csv(&mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let first = csv(1)?;
    ensure!(first == csv(1)?, "repeated run changed the CSV");
    ensure!(first == csv(4)?, "thread count changed the CSV");

    Ok(format!(
        "gradient error {worst_fd:.1e}, stationarity residual {worst_stat:.1e}, CSVs byte-identical"
    ))
}

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("critical benefit", critical_benefit_threshold),
        ("exact roots", exact_roots),
        ("stability", stability),
        ("heterogeneous vs homogeneous", heterogeneous_matches_homogeneous),
        ("size independence", size_independence),
        ("sub-critical collapse", subcritical_collapse),
        ("churn robustness", churn_robustness),
        ("freeze bias", freeze_bias),
        ("convergence-speed ordering", convergence_speed),
        ("property suite", property_suite),
    ];

    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check)
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
