use std::fs::File;
use std::io::{self, BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splitobs::datagen::{TargetFn, DEFAULT_SEED, REPETITIONS};
use splitobs::RadiusPolicy;
use splitobs_bench::{
    observer_from_flags, read_pairs, run_matrix, summarize, suggest_split, BenchError, MatrixFilter,
    ObserverConfig, RecordWriter, Result, RunOptions,
};

#[derive(Parser)]
#[command(name = "splitobs", version, about = "Benchmark attribute observers for online regression trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the synthetic benchmark matrix and write one row per observer and sample.
    Run {
        /// Distribution family (uniform, normal, bimodal) or label such as `normal(0;1)`.
        #[arg(long)]
        distribution: Vec<String>,
        #[arg(long, value_parser = parse_target_fn)]
        target_fn: Vec<TargetFn>,
        #[arg(long)]
        size: Vec<usize>,
        /// Fraction of instances with noisy features (0 or 0.1 in the protocol).
        #[arg(long)]
        noise: Vec<f64>,
        /// EBST, TEBST, QO_fixed_0.01, QO_std_div_2, QO_std_div_3 (default: all five).
        #[arg(long, value_parser = parse_observer)]
        observer: Vec<ObserverConfig>,
        #[arg(long, default_value_t = REPETITIONS)]
        reps: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Results CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Include sizes above 100000.
        #[arg(long)]
        full_sizes: bool,
    },
    /// Average observer ranks per metric from a results CSV.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the best split of an `x,y` CSV as JSON.
    SuggestSplit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Observer name, or `QO` together with --radius / --radius-policy.
        #[arg(long)]
        observer: String,
        #[arg(long)]
        radius: Option<f64>,
        /// `fixed:<r>` or `std_div:<k>`.
        #[arg(long, value_parser = parse_policy)]
        radius_policy: Option<RadiusPolicy>,
    },
}

fn parse_target_fn(s: &str) -> std::result::Result<TargetFn, String> {
    s.parse().map_err(|e: splitobs::Error| e.to_string())
}

fn parse_observer(s: &str) -> std::result::Result<ObserverConfig, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_policy(s: &str) -> std::result::Result<RadiusPolicy, String> {
    s.parse().map_err(|e: splitobs::Error| e.to_string())
}

fn open(path: &PathBuf) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            distribution,
            target_fn,
            size,
            noise,
            observer,
            reps,
            seed,
            out,
            parallelism,
            full_sizes,
        } => {
            let options = RunOptions {
                filter: MatrixFilter { distributions: distribution, target_fns: target_fn, sizes: size, noise, full_sizes },
                observers: if observer.is_empty() { ObserverConfig::standard().to_vec() } else { observer },
                repetitions: reps,
                seed,
                parallelism,
            };
            // validate before creating the output file
            splitobs_bench::plan(&options)?;
            let rows = match out {
                Some(path) => run_matrix(&options, &mut RecordWriter::new(create(&path)?)?)?,
                None => run_matrix(&options, &mut RecordWriter::new(io::stdout().lock())?)?,
            };
            eprintln!("wrote {rows} rows");
        }
        Command::Summarize { input, out } => {
            let (summary, errors) = summarize(open(&input)?)?;
            for e in &errors {
                eprintln!("{}: row {}: {}", input.display(), e.row, e.message);
            }
            print!("{summary}");
            if let Some(path) = out {
                summary.write_csv(create(&path)?)?;
            }
        }
        Command::SuggestSplit { input, observer, radius, radius_policy } => {
            let config = observer_from_flags(&observer, radius, radius_policy)?;
            let pairs = read_pairs(open(&input)?)?;
            let suggestion = suggest_split(&pairs, &config)?;
            println!("{}", serde_json::to_string_pretty(&suggestion).expect("serializable"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
