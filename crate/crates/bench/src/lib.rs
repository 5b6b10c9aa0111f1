//! Benchmark harness for the split-point attribute observers in [`splitobs`].
//!
//! Runs the synthetic protocol matrix, writes one CSV row per observer and
//! sample, and turns result files into average ranks.

mod error;
pub mod observer;
pub mod record;
pub mod runner;
pub mod suggest;
pub mod summary;

pub use error::{BenchError, Result};
pub use observer::ObserverConfig;
pub use record::{read_records, BenchRecord, RecordWriter, RowError};
pub use runner::{collect_matrix, plan, run_bench, run_matrix, MatrixFilter, RunOptions};
pub use suggest::{observer_from_flags, read_pairs, suggest_split, SuggestOutput};
pub use summary::{rank_records, summarize, Metric, RankSummary};
