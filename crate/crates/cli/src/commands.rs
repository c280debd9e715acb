use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use diffserv::analytic::{critical_benefit, homogeneous_equilibrium, stability_eigenvalue};
use diffserv::dynamics::{iterate_to_equilibrium, verify_nash, LearningConfig, PeerStatus};
use diffserv::experiments::{
    benefit_sweep, churn_experiment, freeze_experiment, histogram_experiment, homogeneous_prediction,
    ExperimentConfig, SweepResult,
};
use diffserv::synth::{BenefitDistribution, Instance, InstanceSpec};

use crate::{Cli, Command, Distribution, LearningArgs, PopulationArgs};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_RUNTIME: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid value: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

fn invalid(e: diffserv::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn runtime(e: diffserv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn instance_spec(p: &PopulationArgs, b_av: f64) -> InstanceSpec {
    let benefit_distribution = match p.distribution {
        Distribution::Gamma => BenefitDistribution::Gamma {
            shape: p.gamma_shape,
        },
        Distribution::Gaussian => BenefitDistribution::Gaussian {
            relative_stddev: p.gaussian_stddev,
        },
    };
    InstanceSpec {
        n: p.n,
        density: p.density,
        target_b_av: b_av,
        benefit_distribution,
        initial_mean: p.initial_mean,
        initial_stddev: p.initial_stddev,
        seed: p.seed,
    }
}

fn learning_config(l: &LearningArgs) -> LearningConfig {
    LearningConfig {
        alpha: l.alpha,
        tolerance: l.tolerance,
        max_iterations: l.max_iterations,
    }
}

fn experiment_config(
    p: &PopulationArgs,
    l: &LearningArgs,
    b_av: f64,
    repeats: usize,
) -> Result<ExperimentConfig, CliError> {
    let cfg = ExperimentConfig {
        template: instance_spec(p, b_av),
        learning: learning_config(l),
        repeats,
    };
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

fn check_list(name: &str, values: &[f64], ok: impl Fn(f64) -> bool) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Validation(format!("--{name} needs at least one value")));
    }
    match values.iter().find(|&&v| !ok(v)) {
        Some(v) => Err(CliError::Validation(format!("--{name}: {v} is out of range"))),
        None => Ok(()),
    }
}

/// Creates the output file up front so an unwritable path fails before any
/// computation.
fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("--out {}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Runtime(format!("--out {}: {e}", path.display())))
}

fn enforce_strict(strict: bool, result: &SweepResult) -> Result<(), CliError> {
    let failed = result.rows.iter().filter(|r| !r.converged).count();
    if strict && failed > 0 {
        return Err(CliError::Runtime(format!(
            "{failed} of {} runs did not converge (--strict)",
            result.rows.len()
        )));
    }
    Ok(())
}

fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn execute(cli: Cli) -> Result<String, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Analytic(a) => analytic(a.b_total, a.alpha),
        Command::Generate(g) => {
            let spec = instance_spec(&g.population, g.b_av);
            spec.validate().map_err(invalid)?;
            let out = create_output(&g.out)?;
            let instance = Instance::generate(&spec).map_err(runtime)?;
            instance.write_to(out).map_err(runtime)?;
            Ok(format!(
                "generate n={} density={} seed={} nnz={} realized_b_av={:.6} out={}",
                spec.n,
                spec.density,
                spec.seed,
                instance.matrix.nnz(),
                instance.matrix.average_benefit(),
                g.out.display()
            ))
        }
        Command::Run(r) => run(r),
        Command::Sweep(s) => {
            check_list("b-av-values", &s.b_av_values, |v| v.is_finite() && v > 0.0)?;
            let cfg = experiment_config(&s.population, &s.learning, s.b_av_values[0], s.repeats)?;
            let out = create_output(&s.out)?;
            let result = benefit_sweep(&cfg, &s.b_av_values).map_err(runtime)?;
            write_sweep(&result, out, &s.out)?;
            enforce_strict(s.learning.strict, &result)?;
            let converged = result.rows.iter().filter(|r| r.converged).count();
            Ok(format!(
                "sweep n={} b_av=[{}] repeats={} rows={} converged={}/{} out={}",
                cfg.template.n,
                format_list(&s.b_av_values),
                s.repeats,
                result.rows.len(),
                converged,
                result.rows.len(),
                s.out.display()
            ))
        }
        Command::Churn(c) => {
            check_list("alive-fractions", &c.alive_fractions, |f| f > 0.0 && f <= 1.0)?;
            let cfg = experiment_config(&c.population, &c.learning, c.b_av, c.repeats)?;
            let out = create_output(&c.out)?;
            let result = churn_experiment(&cfg, &c.alive_fractions).map_err(runtime)?;
            write_sweep(&result, out, &c.out)?;
            enforce_strict(c.learning.strict, &result)?;
            // Smallest alive fraction at which every seed still has a
            // positive equilibrium.
            let surviving = result
                .summarize()
                .into_iter()
                .filter(|p| {
                    result
                        .rows
                        .iter()
                        .filter(|r| r.parameter == p.parameter)
                        .all(|r| !r.collapsed())
                })
                .map(|p| p.parameter)
                .fold(f64::INFINITY, f64::min);
            let survive = if surviving.is_finite() {
                surviving.to_string()
            } else {
                "none".to_string()
            };
            Ok(format!(
                "churn n={} b_av={} fractions=[{}] repeats={} min_surviving_fraction={} out={}",
                cfg.template.n,
                c.b_av,
                format_list(&c.alive_fractions),
                c.repeats,
                survive,
                c.out.display()
            ))
        }
        Command::Freeze(f) => {
            check_list("frozen-fractions", &f.frozen_fractions, |x| (0.0..=1.0).contains(&x))?;
            check_list("frozen-values", &f.frozen_values, |x| x.is_finite() && x >= 0.0)?;
            let cfg = experiment_config(&f.population, &f.learning, f.b_av, f.repeats)?;
            let out = create_output(&f.out)?;
            let result =
                freeze_experiment(&cfg, &f.frozen_fractions, &f.frozen_values).map_err(runtime)?;
            write_sweep(&result, out, &f.out)?;
            enforce_strict(f.learning.strict, &result)?;
            Ok(format!(
                "freeze n={} b_av={} fractions=[{}] values=[{}] repeats={} rows={} out={}",
                cfg.template.n,
                f.b_av,
                format_list(&f.frozen_fractions),
                format_list(&f.frozen_values),
                f.repeats,
                result.rows.len(),
                f.out.display()
            ))
        }
        Command::Hist(h) => {
            if h.bins == 0 {
                return Err(CliError::Validation("--bins must be at least 1".into()));
            }
            let cfg = experiment_config(&h.population, &h.learning, h.b_av, 1)?;
            let out = create_output(&h.out)?;
            let report = histogram_experiment(&cfg, h.bins).map_err(runtime)?;
            report.write_csv(out).map_err(runtime)?;
            if h.learning.strict && !report.converged {
                return Err(CliError::Runtime(format!(
                    "did not converge within {} iterations (--strict)",
                    cfg.learning.max_iterations
                )));
            }
            Ok(format!(
                "hist n={} b_av={} bins={} mean_benefit={:.6} mean_contribution={:.6} prediction={:.6} out={}",
                cfg.template.n,
                h.b_av,
                h.bins,
                report.benefit.mean,
                report.contribution.mean,
                report.homogeneous_prediction,
                h.out.display()
            ))
        }
    }
}

fn write_sweep(result: &SweepResult, out: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    result
        .write_csv(out)
        .map_err(|e| CliError::Runtime(format!("--out {}: {e}", path.display())))
}

fn analytic(b_total: f64, alpha: f64) -> Result<String, CliError> {
    let pair = homogeneous_equilibrium(b_total, alpha).map_err(invalid)?;
    let b_c = critical_benefit(alpha).map_err(invalid)?.value();
    if !pair.exists {
        return Ok(format!("no equilibrium (b_total*alpha < 4), b_c={b_c:?}"));
    }
    let lambda = if alpha == 1.0 {
        format!("{:.6}", stability_eigenvalue(pair.d_hi, pair.d_hi).map_err(invalid)?)
    } else {
        "n/a".to_string()
    };
    Ok(format!(
        "d_lo={:.6} d_hi={:.6} b_c={b_c:?} stable_lambda={lambda}",
        pair.d_lo, pair.d_hi
    ))
}

fn run(r: crate::RunArgs) -> Result<String, CliError> {
    let learning = learning_config(&r.learning);
    learning.validate().map_err(invalid)?;
    let instance = match &r.instance {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::Runtime(format!("--instance {}: {e}", path.display())))?;
            Instance::read_from(BufReader::new(file)).map_err(|e| match e {
                diffserv::Error::Io(io) => {
                    CliError::Runtime(format!("--instance {}: {io}", path.display()))
                }
                other => CliError::Validation(format!("--instance {}: {other}", path.display())),
            })?
        }
        None => {
            let spec = instance_spec(&r.population, r.b_av);
            spec.validate().map_err(invalid)?;
            Instance::generate(&spec).map_err(runtime)?
        }
    };
    let mut out = create_output(&r.out)?;

    let n = instance.n();
    let status = vec![PeerStatus::Active; n];
    let record =
        iterate_to_equilibrium(&instance.matrix, &instance.initial, &status, &learning).map_err(runtime)?;
    let curve = learning.curve().map_err(invalid)?;
    let report = verify_nash(&instance.matrix, &record.final_profile, &curve).map_err(runtime)?;

    let io = |e: std::io::Error| CliError::Runtime(format!("--out {}: {e}", r.out.display()));
    writeln!(out, "peer,initial,contribution,row_benefit").map_err(io)?;
    for i in 0..n {
        writeln!(
            out,
            "{i},{},{},{}",
            instance.initial.get(i),
            record.final_profile.get(i),
            instance.matrix.row_benefit(i)
        )
        .map_err(io)?;
    }
    finish(out, &r.out)?;

    if r.learning.strict && !record.converged {
        return Err(CliError::Runtime(format!(
            "did not converge within {} iterations, residual {:e} (--strict)",
            learning.max_iterations, record.final_residual
        )));
    }
    let b_av = instance.matrix.average_benefit();
    Ok(format!(
        "run n={n} b_av={:.6} seed={} mean={:.6} prediction={:.6} iterations={} converged={} max_gain={:e} out={}",
        b_av,
        instance.seed,
        record.final_mean(),
        homogeneous_prediction(b_av, learning.alpha),
        record.iterations,
        record.converged,
        report.max_gain,
        r.out.display()
    ))
}
