//! `diffserv`: command-line front end for the incentive simulator.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid value, 4 runtime error
//! (I/O failure, or non-convergence under `--strict`).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "diffserv", version, about = "Differential-service incentive simulator for peer-to-peer systems")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads; 0 uses all available cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form homogeneous equilibria and their stability.
    Analytic(AnalyticArgs),
    /// Generate a population and write it as an instance file.
    Generate(GenerateArgs),
    /// Run best-response learning on one population.
    Run(RunArgs),
    /// Equilibrium contribution and convergence time against average benefit.
    Sweep(SweepArgs),
    /// Equilibrium of the survivors after a share of peers leaves.
    Churn(ChurnArgs),
    /// Equilibrium with a share of peers frozen at a fixed contribution.
    Freeze(FreezeArgs),
    /// Histograms of benefits and equilibrium contributions.
    Hist(HistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Distribution {
    Gamma,
    Gaussian,
}

#[derive(Debug, Clone, Args)]
pub struct PopulationArgs {
    /// Number of peers.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Fraction of the other peers each peer benefits from.
    #[arg(long, default_value_t = 0.02)]
    pub density: f64,
    /// Distribution of the nonzero benefits.
    #[arg(long, value_enum, default_value_t = Distribution::Gamma)]
    pub distribution: Distribution,
    /// Shape parameter of the gamma distribution.
    #[arg(long, default_value_t = 2.0)]
    pub gamma_shape: f64,
    /// Standard deviation of the gaussian distribution, relative to its mean.
    #[arg(long, default_value_t = 0.5)]
    pub gaussian_stddev: f64,
    /// Mean of the initial contributions.
    #[arg(long, default_value_t = 1.0)]
    pub initial_mean: f64,
    /// Standard deviation of the initial contributions.
    #[arg(long, default_value_t = 0.25)]
    pub initial_stddev: f64,
    /// Seed of the first repeat; repeats use consecutive seeds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LearningArgs {
    /// Exponent of the service probability curve.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Stop when the mean contribution change per peer falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Upper bound on learning rounds.
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    /// Exit with status 4 if any run fails to converge.
    #[arg(long, default_value_t = false)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    /// Total benefit b (N - 1) of the homogeneous system.
    #[arg(long)]
    pub b_total: f64,
    /// Exponent of the service probability curve.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    /// Target average total benefit per peer.
    #[arg(long, default_value_t = 6.0)]
    pub b_av: f64,
    /// Instance file to write.
    #[arg(long, default_value = "instance.txt")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[command(flatten)]
    pub learning: LearningArgs,
    /// Target average total benefit per peer.
    #[arg(long, default_value_t = 6.0)]
    pub b_av: f64,
    /// Replay an instance file instead of generating a population.
    #[arg(long, value_name = "PATH")]
    pub instance: Option<PathBuf>,
    /// Per-peer CSV of final contributions.
    #[arg(long, default_value = "equilibrium.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[command(flatten)]
    pub learning: LearningArgs,
    /// Average benefits to sweep.
    #[arg(long, value_delimiter = ',', default_value = "3,4.4,5,6,8,12")]
    pub b_av_values: Vec<f64>,
    /// Seeds per point.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ChurnArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[command(flatten)]
    pub learning: LearningArgs,
    /// Average benefit before any peer leaves.
    #[arg(long, default_value_t = 12.0)]
    pub b_av: f64,
    /// Fractions of peers that stay.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    pub alive_fractions: Vec<f64>,
    /// Seeds per point.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value = "churn.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FreezeArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[command(flatten)]
    pub learning: LearningArgs,
    /// Average benefit.
    #[arg(long, default_value_t = 6.0)]
    pub b_av: f64,
    /// Fractions of peers that refuse to adapt.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub frozen_fractions: Vec<f64>,
    /// Contributions the frozen peers hold.
    #[arg(long, alias = "frozen-value", value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub frozen_values: Vec<f64>,
    /// Seeds per point.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value = "freeze.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct HistArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[command(flatten)]
    pub learning: LearningArgs,
    /// Average benefit.
    #[arg(long, default_value_t = 6.0)]
    pub b_av: f64,
    /// Bins per histogram.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value = "hist.csv")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(path) = config::take_config_flag(&mut argv) {
        match config::load(path.as_ref()) {
            Ok(entries) => config::splice(&mut argv, &entries),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(commands::EXIT_USAGE);
            }
        }
    }

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match commands::execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
