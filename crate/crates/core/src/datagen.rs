//! Deterministic synthetic `(x, y)` streams for benchmarking observers.
//!
//! A [`SampleSpec`] fully determines its sample. Randomness comes from
//! ChaCha8 seeded with `spec.seed`; three independent ChaCha streams of that
//! seed are used, so changing one stage never shifts the draws of another:
//!
//! | stream | draws |
//! |--------|-------|
//! | 0 | feature values |
//! | 1 | target coefficients |
//! | 2 | noisy subset and noise values |
//!
//! Target coefficients are drawn uniformly from `[-1, 1]` once per sample.
//! Noise is additive Gaussian and applied to the *feature* of a random subset
//! of exactly `round(noise_fraction * size)` instances, after the target has
//! been computed.

use std::fmt;
use std::io::{self, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, Uniform};

use crate::error::{Error, Result};

pub const PROTOCOL_SIZES: [usize; 19] = [
    50, 100, 200, 400, 500, 750, 1000, 2500, 5000, 7000, 10_000, 15_000, 25_000, 50_000, 75_000,
    100_000, 200_000, 500_000, 1_000_000,
];

/// Largest size of the default (desk-scale) matrix.
pub const DESK_MAX_SIZE: usize = 100_000;

pub const NOISE_FRACTIONS: [f64; 2] = [0.0, 0.1];

pub const REPETITIONS: u32 = 10;

pub const DEFAULT_SEED: u64 = 42;

const STREAM_X: u64 = 0;
const STREAM_COEFFICIENTS: u64 = 1;
const STREAM_NOISE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    Normal { mu: f64, sigma: f64 },
    /// Equal-probability mixture of two normals.
    Bimodal { mu1: f64, sigma1: f64, mu2: f64, sigma2: f64 },
}

impl Distribution {
    /// The nine feature distributions of the benchmark protocol.
    pub fn protocol() -> [Distribution; 9] {
        use Distribution::*;
        [
            Uniform { lo: -1.0, hi: 1.0 },
            Uniform { lo: -0.1, hi: 0.1 },
            Uniform { lo: -7.0, hi: 7.0 },
            Normal { mu: 0.0, sigma: 1.0 },
            Normal { mu: 0.0, sigma: 0.1 },
            Normal { mu: 0.0, sigma: 7.0 },
            Bimodal { mu1: -1.0, sigma1: 1.0, mu2: 1.0, sigma2: 1.0 },
            Bimodal { mu1: -0.1, sigma1: 0.1, mu2: 0.1, sigma2: 0.1 },
            Bimodal { mu1: -7.0, sigma1: 7.0, mu2: 7.0, sigma2: 0.1 },
        ]
    }

    pub fn family(&self) -> &'static str {
        match self {
            Distribution::Uniform { .. } => "uniform",
            Distribution::Normal { .. } => "normal",
            Distribution::Bimodal { .. } => "bimodal",
        }
    }

    /// Parameters as `lo;hi`, `mu;sigma` or `mu1;sigma1|mu2;sigma2`.
    pub fn params(&self) -> String {
        match *self {
            Distribution::Uniform { lo, hi } => format!("{lo};{hi}"),
            Distribution::Normal { mu, sigma } => format!("{mu};{sigma}"),
            Distribution::Bimodal { mu1, sigma1, mu2, sigma2 } => format!("{mu1};{sigma1}|{mu2};{sigma2}"),
        }
    }

    /// Parses a family name plus the [`params`](Self::params) encoding.
    pub fn parse(family: &str, params: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid parameters {params:?} for distribution {family:?}"));
        let pair = |s: &str| -> Result<(f64, f64)> {
            let (a, b) = s.split_once(';').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        let dist = match family {
            "uniform" => {
                let (lo, hi) = pair(params)?;
                Distribution::Uniform { lo, hi }
            }
            "normal" => {
                let (mu, sigma) = pair(params)?;
                Distribution::Normal { mu, sigma }
            }
            "bimodal" => {
                let (a, b) = params.split_once('|').ok_or_else(bad)?;
                let ((mu1, sigma1), (mu2, sigma2)) = (pair(a)?, pair(b)?);
                Distribution::Bimodal { mu1, sigma1, mu2, sigma2 }
            }
            other => return Err(Error::Config(format!("unknown distribution family {other:?}"))),
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Distribution::Normal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Distribution::Bimodal { mu1, sigma1, mu2, sigma2 } => {
                [mu1, sigma1, mu2, sigma2].iter().all(|v| v.is_finite()) && sigma1 > 0.0 && sigma2 > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid distribution {self}")))
        }
    }

    /// Largest dispersion parameter (standard deviation, or half-range for
    /// the uniform).
    pub fn dispersion(&self) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => (hi - lo) / 2.0,
            Distribution::Normal { sigma, .. } => sigma,
            Distribution::Bimodal { sigma1, sigma2, .. } => sigma1.max(sigma2),
        }
    }

    /// Standard deviation of the noise added to perturbed features: small
    /// for small-dispersion distributions.
    pub fn noise_sd(&self) -> f64 {
        if self.dispersion() <= 0.1 {
            0.01
        } else {
            0.1
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let normal = |mu, sigma| Normal::new(mu, sigma).map_err(|e| Error::Config(e.to_string()));
        Ok(match *self {
            Distribution::Uniform { lo, hi } => {
                Sampler::Uniform(Uniform::new(lo, hi).map_err(|e| Error::Config(e.to_string()))?)
            }
            Distribution::Normal { mu, sigma } => Sampler::Normal(normal(mu, sigma)?),
            Distribution::Bimodal { mu1, sigma1, mu2, sigma2 } => {
                Sampler::Bimodal(normal(mu1, sigma1)?, normal(mu2, sigma2)?)
            }
        })
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family(), self.params())
    }
}

enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
    Bimodal(Normal<f64>, Normal<f64>),
}

impl Sampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Bimodal(a, b) => {
                if rng.random_bool(0.5) {
                    a.sample(rng)
                } else {
                    b.sample(rng)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetFn {
    /// `a1 x + a0`
    Lin,
    /// `a3 x³ + a2 x² + a1 x + a0`
    Cub,
}

impl TargetFn {
    pub const ALL: [TargetFn; 2] = [TargetFn::Lin, TargetFn::Cub];

    pub fn name(&self) -> &'static str {
        match self {
            TargetFn::Lin => "lin",
            TargetFn::Cub => "cub",
        }
    }
}

impl fmt::Display for TargetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TargetFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lin" => Ok(TargetFn::Lin),
            "cub" => Ok(TargetFn::Cub),
            other => Err(Error::Config(format!("unknown target function {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl TargetCoefficients {
    pub fn linear(a0: f64, a1: f64) -> Self {
        TargetCoefficients { a0, a1, a2: 0.0, a3: 0.0 }
    }

    /// Draws the coefficients `target_fn` uses from `U[-1, 1]`; unused ones stay 0.
    pub fn draw<R: Rng>(target_fn: TargetFn, rng: &mut R) -> Self {
        let mut c = || rng.random_range(-1.0..=1.0);
        match target_fn {
            TargetFn::Lin => {
                let (a0, a1) = (c(), c());
                TargetCoefficients::linear(a0, a1)
            }
            TargetFn::Cub => {
                let (a0, a1, a2, a3) = (c(), c(), c(), c());
                TargetCoefficients { a0, a1, a2, a3 }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub size: usize,
    pub distribution: Distribution,
    pub target_fn: TargetFn,
    /// Fraction of instances whose feature is perturbed, in `[0, 1]`.
    pub noise_fraction: f64,
    pub repetition: u32,
    pub seed: u64,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Config("sample size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_fraction) {
            return Err(Error::Config(format!("noise fraction {} must lie in [0, 1]", self.noise_fraction)));
        }
        self.distribution.validate()
    }

    /// Number of instances whose feature receives noise.
    pub fn noisy_count(&self) -> usize {
        (self.noise_fraction * self.size as f64).round() as usize
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub pairs: Vec<(f64, f64)>,
    pub coefficients: TargetCoefficients,
    /// Indices of the perturbed instances, ascending.
    pub noisy: Vec<usize>,
}

impl Sample {
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.1)
    }
}

/// Generates the sample described by `spec`.
pub fn generate_sample(spec: &SampleSpec) -> Result<Sample> {
    spec.validate()?;
    let coefficients = TargetCoefficients::draw(spec.target_fn, &mut spec.rng(STREAM_COEFFICIENTS));
    generate_with_coefficients(spec, coefficients)
}

/// Like [`generate_sample`] but with caller-chosen target coefficients.
pub fn generate_with_coefficients(spec: &SampleSpec, coefficients: TargetCoefficients) -> Result<Sample> {
    spec.validate()?;
    let sampler = spec.distribution.sampler()?;
    let mut rng = spec.rng(STREAM_X);
    let mut pairs: Vec<(f64, f64)> = (0..spec.size)
        .map(|_| {
            let x = sampler.draw(&mut rng);
            (x, coefficients.eval(x))
        })
        .collect();

    let mut rng = spec.rng(STREAM_NOISE);
    let mut noisy = index::sample(&mut rng, spec.size, spec.noisy_count()).into_vec();
    noisy.sort_unstable();
    let noise = Normal::new(0.0, spec.distribution.noise_sd()).map_err(|e| Error::Config(e.to_string()))?;
    for &i in &noisy {
        pairs[i].0 += noise.sample(&mut rng);
    }
    Ok(Sample { pairs, coefficients, noisy })
}

/// Derives a per-cell seed from a base seed and the cell coordinates.
pub fn cell_seed(base: u64, coordinates: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &c in coordinates {
        state = splitmix64(state ^ c.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Full protocol matrix with the default base seed.
pub fn protocol_matrix() -> Vec<SampleSpec> {
    matrix(&PROTOCOL_SIZES, REPETITIONS, DEFAULT_SEED)
}

/// Cartesian product of `sizes`, the nine distributions, both target
/// functions, both noise settings and `repetitions` seeds.
pub fn matrix(sizes: &[usize], repetitions: u32, base_seed: u64) -> Vec<SampleSpec> {
    let mut specs = Vec::new();
    for (d, distribution) in Distribution::protocol().into_iter().enumerate() {
        for (t, target_fn) in TargetFn::ALL.into_iter().enumerate() {
            for (n, noise_fraction) in NOISE_FRACTIONS.into_iter().enumerate() {
                for &size in sizes {
                    for repetition in 0..repetitions {
                        let seed = cell_seed(
                            base_seed,
                            &[d as u64, t as u64, n as u64, size as u64, u64::from(repetition)],
                        );
                        specs.push(SampleSpec { size, distribution, target_fn, noise_fraction, repetition, seed });
                    }
                }
            }
        }
    }
    specs
}

/// Writes pairs as a two-column `x,y` CSV with a header row.
pub fn write_csv<W: Write>(pairs: &[(f64, f64)], mut out: W) -> io::Result<()> {
    writeln!(out, "x,y")?;
    for (x, y) in pairs {
        writeln!(out, "{x},{y}")?;
    }
    out.flush()
}
