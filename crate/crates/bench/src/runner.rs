//! Benchmark execution: one generated sample per cell, every configured
//! observer fed the same stream.

use std::io::Write;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use splitobs::datagen::{self, Distribution, SampleSpec, TargetFn, DESK_MAX_SIZE, PROTOCOL_SIZES};
use splitobs::VarStats;

use crate::error::{BenchError, Result};
use crate::observer::ObserverConfig;
use crate::record::{BenchRecord, RecordWriter};

/// Slot count above which a warning is logged.
pub const SLOT_WARNING: usize = 1_000_000;

/// Runs every observer on the sample described by `spec`.
pub fn run_bench(spec: &SampleSpec, observers: &[ObserverConfig]) -> Result<Vec<BenchRecord>> {
    let sample = datagen::generate_sample(spec)?;
    let feature_std = VarStats::from_values(sample.xs())?.std_dev();
    let total = VarStats::from_values(sample.ys())?;

    let mut records = Vec::with_capacity(observers.len());
    for config in observers {
        let mut observer = config.build(feature_std)?;

        let start = Instant::now();
        for &(x, y) in &sample.pairs {
            observer.update(x, y, 1.0)?;
        }
        let observe_time_s = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let best = observer.best_split(&total);
        let query_time_s = start.elapsed().as_secs_f64();

        let n_elements = observer.n_elements();
        if config.is_qo() && n_elements > SLOT_WARNING {
            warn!("{config} stored {n_elements} slots for {}", spec.distribution);
        }
        records.push(BenchRecord {
            observer: config.name(),
            distribution: spec.distribution.family().to_string(),
            dist_params: spec.distribution.params(),
            target_fn: spec.target_fn.to_string(),
            noise_fraction: spec.noise_fraction,
            size: spec.size,
            repetition: spec.repetition,
            seed: spec.seed,
            merit: best.map_or(0.0, |s| s.merit),
            cut_point: best.map(|s| s.cut_point),
            n_elements,
            observe_time_s,
            query_time_s,
        });
    }
    Ok(records)
}

/// Which cells of the protocol matrix to run. Empty lists mean "all".
#[derive(Debug, Clone, Default)]
pub struct MatrixFilter {
    /// Family names (`normal`) or full labels (`normal(0;1)`).
    pub distributions: Vec<String>,
    pub target_fns: Vec<TargetFn>,
    pub sizes: Vec<usize>,
    pub noise: Vec<f64>,
    /// Include the sizes above the desk-scale cap when `sizes` is empty.
    pub full_sizes: bool,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub filter: MatrixFilter,
    pub observers: Vec<ObserverConfig>,
    pub repetitions: u32,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            filter: MatrixFilter::default(),
            observers: ObserverConfig::standard().to_vec(),
            repetitions: datagen::REPETITIONS,
            seed: datagen::DEFAULT_SEED,
            parallelism: 1,
        }
    }
}

enum DistributionFilter {
    Family(String),
    Exact(Distribution),
}

impl DistributionFilter {
    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((family, rest)) = s.split_once('(') {
            let params = rest
                .strip_suffix(')')
                .ok_or_else(|| BenchError::Config(format!("unbalanced parentheses in distribution {s:?}")))?;
            return Ok(DistributionFilter::Exact(Distribution::parse(family, params)?));
        }
        match s {
            "uniform" | "normal" | "bimodal" => Ok(DistributionFilter::Family(s.to_string())),
            _ => Err(BenchError::Config(format!("unknown distribution {s:?}"))),
        }
    }

    fn matches(&self, d: &Distribution) -> bool {
        match self {
            DistributionFilter::Family(f) => d.family() == f,
            DistributionFilter::Exact(e) => e == d,
        }
    }
}

/// The cells selected by `options`, in deterministic order.
pub fn plan(options: &RunOptions) -> Result<Vec<SampleSpec>> {
    let filter = &options.filter;
    if options.parallelism == 0 {
        return Err(BenchError::Config("parallelism must be at least 1".into()));
    }
    if options.observers.is_empty() {
        return Err(BenchError::Config("no observer selected".into()));
    }
    if let Some(&size) = filter.sizes.iter().find(|&&s| s == 0) {
        return Err(BenchError::Config(format!("invalid sample size {size}")));
    }
    if let Some(noise) = filter.noise.iter().find(|n| !(0.0..=1.0).contains(*n)) {
        return Err(BenchError::Config(format!("noise fraction {noise} must lie in [0, 1]")));
    }
    let distributions = filter
        .distributions
        .iter()
        .map(|d| DistributionFilter::parse(d))
        .collect::<Result<Vec<_>>>()?;

    let sizes: Vec<usize> = if !filter.sizes.is_empty() {
        let mut sizes = filter.sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    } else if filter.full_sizes {
        PROTOCOL_SIZES.to_vec()
    } else {
        PROTOCOL_SIZES.iter().copied().filter(|&s| s <= DESK_MAX_SIZE).collect()
    };

    Ok(datagen::matrix(&sizes, options.repetitions, options.seed)
        .into_iter()
        .filter(|s| distributions.is_empty() || distributions.iter().any(|d| d.matches(&s.distribution)))
        .filter(|s| filter.target_fns.is_empty() || filter.target_fns.contains(&s.target_fn))
        .filter(|s| filter.noise.is_empty() || filter.noise.contains(&s.noise_fraction))
        .collect())
}

/// Runs every selected cell and streams the rows to `out`. Returns the number
/// of rows written.
pub fn run_matrix<W: Write>(options: &RunOptions, out: &mut RecordWriter<W>) -> Result<usize> {
    let cells = plan(options)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;

    let mut written = 0;
    for batch in cells.chunks(options.parallelism * 4) {
        let results: Vec<Result<Vec<BenchRecord>>> =
            pool.install(|| batch.par_iter().map(|spec| run_bench(spec, &options.observers)).collect());
        for records in results {
            for record in records? {
                out.write(&record)?;
                written += 1;
            }
        }
        out.flush()?;
    }
    Ok(written)
}

/// Runs the selected cells in memory.
pub fn collect_matrix(options: &RunOptions) -> Result<Vec<BenchRecord>> {
    let cells = plan(options)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let nested: Vec<Vec<BenchRecord>> =
        pool.install(|| cells.par_iter().map(|spec| run_bench(spec, &options.observers)).collect::<Result<_>>())?;
    Ok(nested.into_iter().flatten().collect())
}
