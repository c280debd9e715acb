//! Seeded generation of heterogeneous peer populations.
//!
//! Each peer interacts with a fixed-size random subset of the others. The
//! benefit it draws from each partner comes from a Gamma (or truncated
//! Gaussian) distribution whose mean is chosen so that the expected total
//! benefit per peer equals `target_b_av`.
//!
//! Randomness comes from ChaCha8 seeded with `seed`. Independent streams of
//! the same seed are used for the matrix, the initial profile and the
//! experiment-level peer selection, so changing one never shifts the others.
//! Gamma variates use the Marsaglia-Tsang method from `rand_distr`.

use std::io::{BufRead, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::model::{BenefitMatrix, ContributionProfile};

const MATRIX_STREAM: u64 = 0;
const PROFILE_STREAM: u64 = 1;
/// Stream reserved for experiment-level choices (which peers leave, which
/// are frozen).
pub const SELECTION_STREAM: u64 = 2;

/// Seeded generator for one of the independent streams of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenefitDistribution {
    /// Gamma with the given shape; the scale is set by the target mean.
    Gamma { shape: f64 },
    /// Normal with standard deviation `relative_stddev * mean`, truncated
    /// at zero. A zero deviation gives the homogeneous system.
    Gaussian { relative_stddev: f64 },
}

impl Default for BenefitDistribution {
    fn default() -> Self {
        BenefitDistribution::Gamma { shape: 2.0 }
    }
}

/// Everything needed to regenerate a population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    /// Fraction of the other peers each peer draws benefit from.
    pub density: f64,
    pub target_b_av: f64,
    pub benefit_distribution: BenefitDistribution,
    pub initial_mean: f64,
    pub initial_stddev: f64,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            density: 0.02,
            target_b_av: 6.0,
            benefit_distribution: BenefitDistribution::default(),
            initial_mean: 1.0,
            initial_stddev: 0.25,
            seed: 0,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n = {} must be at least 2", self.n)));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::Config(format!(
                "density = {} must lie in (0, 1]",
                self.density
            )));
        }
        if self.density * ((self.n - 1) as f64) < 1.0 {
            return Err(Error::Config(format!(
                "density * (n - 1) = {} leaves peers without partners",
                self.density * ((self.n - 1) as f64)
            )));
        }
        check_positive("target_b_av", self.target_b_av)?;
        match self.benefit_distribution {
            BenefitDistribution::Gamma { shape } => {
                check_positive("gamma shape", shape)?;
            }
            BenefitDistribution::Gaussian { relative_stddev } => {
                check_nonnegative("relative_stddev", relative_stddev)?;
            }
        }
        check_nonnegative("initial_mean", self.initial_mean)?;
        check_nonnegative("initial_stddev", self.initial_stddev)?;
        Ok(())
    }

    /// Number of partners per peer, `round(density (n - 1))`.
    pub fn partners_per_peer(&self) -> usize {
        (self.density * ((self.n - 1) as f64)).round() as usize
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

enum Sampler {
    Gamma(Gamma<f64>),
    Normal(Normal<f64>),
    Constant(f64),
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Gamma(g) => g.sample(rng),
            Sampler::Normal(nd) => nd.sample(rng).max(0.0),
            Sampler::Constant(v) => *v,
        }
    }
}

/// Random sparse benefit matrix with `round(density (n - 1))` partners per
/// row and expected row sum `target_b_av`.
pub fn generate_benefit_matrix(spec: &InstanceSpec) -> Result<BenefitMatrix> {
    spec.validate()?;
    let n = spec.n;
    let m = spec.partners_per_peer();
    let mean = spec.target_b_av / m as f64;
    let sampler = match spec.benefit_distribution {
        BenefitDistribution::Gamma { shape } => Sampler::Gamma(
            Gamma::new(shape, mean / shape).map_err(|e| Error::Config(format!("gamma: {e}")))?,
        ),
        BenefitDistribution::Gaussian { relative_stddev: 0.0 } => {
            Sampler::Constant(mean)
        }
        BenefitDistribution::Gaussian { relative_stddev } => Sampler::Normal(
            Normal::new(mean, relative_stddev * mean)
                .map_err(|e| Error::Config(format!("gaussian: {e}")))?,
        ),
    };

    let mut rng = stream_rng(spec.seed, MATRIX_STREAM);
    let mut triplets = Vec::with_capacity(n * m);
    for i in 0..n {
        // Sample among the n - 1 other peers, skipping i itself.
        let mut partners: Vec<usize> = index::sample(&mut rng, n - 1, m)
            .into_iter()
            .map(|k| if k >= i { k + 1 } else { k })
            .collect();
        partners.sort_unstable();
        for j in partners {
            triplets.push((i, j, sampler.draw(&mut rng)));
        }
    }
    BenefitMatrix::from_triplets(n, triplets)
}

/// Initial contributions drawn from `Normal(initial_mean, initial_stddev)`
/// and clamped at zero.
pub fn generate_initial_profile(spec: &InstanceSpec) -> Result<ContributionProfile> {
    spec.validate()?;
    if spec.initial_stddev == 0.0 {
        return ContributionProfile::uniform(spec.n, spec.initial_mean);
    }
    let normal = Normal::new(spec.initial_mean, spec.initial_stddev)
        .map_err(|e| Error::Config(format!("initial profile: {e}")))?;
    let mut rng = stream_rng(spec.seed, PROFILE_STREAM);
    let values = (0..spec.n).map(|_| normal.sample(&mut rng).max(0.0)).collect();
    ContributionProfile::new(values)
}

/// A concrete population: benefit matrix plus starting contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub density: f64,
    pub seed: u64,
    pub matrix: BenefitMatrix,
    pub initial: ContributionProfile,
}

impl Instance {
    pub fn generate(spec: &InstanceSpec) -> Result<Self> {
        Ok(Self {
            density: spec.density,
            seed: spec.seed,
            matrix: generate_benefit_matrix(spec)?,
            initial: generate_initial_profile(spec)?,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Writes the plain-text instance format:
    ///
    /// ```text
    /// n density seed
    /// i j b_ij        (one line per nonzero entry)
    /// i d0_i          (one line per peer)
    /// ```
    ///
    /// Floats use the shortest representation that parses back to the same
    /// bits.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.n(), self.density, self.seed)?;
        for (i, j, b) in self.matrix.entries() {
            writeln!(w, "{i} {j} {b}")?;
        }
        for (i, d) in self.initial.as_slice().iter().enumerate() {
            writeln!(w, "{i} {d}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

        let (line_no, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, "header must be `n density seed`"));
        }
        let n: usize = parse_field(line_no, fields[0], "n")?;
        let density: f64 = parse_field(line_no, fields[1], "density")?;
        let seed: u64 = parse_field(line_no, fields[2], "seed")?;

        let mut triplets = Vec::new();
        let mut initial = Vec::with_capacity(n);
        for (line_no, line) in lines {
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.len() {
                3 if initial.is_empty() => {
                    let i: usize = parse_field(line_no, fields[0], "i")?;
                    let j: usize = parse_field(line_no, fields[1], "j")?;
                    let b: f64 = parse_field(line_no, fields[2], "b_ij")?;
                    triplets.push((i, j, b));
                }
                2 => {
                    let i: usize = parse_field(line_no, fields[0], "i")?;
                    if i != initial.len() {
                        return Err(parse_err(
                            line_no,
                            &format!("expected peer {} but found {i}", initial.len()),
                        ));
                    }
                    initial.push(parse_field::<f64>(line_no, fields[1], "d0")?);
                }
                _ => return Err(parse_err(line_no, "unexpected line")),
            }
        }
        if initial.len() != n {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {n} initial contributions, found {}", initial.len()),
            });
        }
        Ok(Self {
            density,
            seed,
            matrix: BenefitMatrix::from_triplets(n, triplets)?,
            initial: ContributionProfile::new(initial)?,
        })
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, raw: &str, name: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| parse_err(line, &format!("invalid {name} `{raw}`")))
}
