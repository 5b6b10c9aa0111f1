//! Result rows and their CSV encoding.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const HEADER: [&str; 13] = [
    "observer",
    "distribution",
    "dist_params",
    "target_fn",
    "noise_fraction",
    "size",
    "repetition",
    "seed",
    "merit",
    "cut_point",
    "n_elements",
    "observe_time_s",
    "query_time_s",
];

/// One measurement: a single observer on a single generated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub observer: String,
    pub distribution: String,
    pub dist_params: String,
    pub target_fn: String,
    pub noise_fraction: f64,
    pub size: usize,
    pub repetition: u32,
    pub seed: u64,
    /// Variance reduction of the best split; 0 when there is none.
    pub merit: f64,
    pub cut_point: Option<f64>,
    pub n_elements: usize,
    pub observe_time_s: f64,
    pub query_time_s: f64,
}

impl BenchRecord {
    /// Copy with the timing columns zeroed, leaving only the deterministic part.
    pub fn without_timings(&self) -> BenchRecord {
        BenchRecord { observe_time_s: 0.0, query_time_s: 0.0, ..self.clone() }
    }
}

/// Streams records to a CSV sink; the header is always written, even when
/// no record follows.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(sink: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        inner.write_record(HEADER)?;
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, record: &BenchRecord) -> Result<()> {
        self.inner.serialize(record)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| e.into_error().into())
    }
}

/// A row that could not be parsed. `row` counts data rows from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

/// Reads every parseable record, collecting the rows that failed.
pub fn read_records<R: Read>(source: R) -> Result<(Vec<BenchRecord>, Vec<RowError>)> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(HEADER.iter().copied()) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header: {}", headers.iter().collect::<Vec<_>>().join(",")),
        ))
        .into());
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let parsed = row.and_then(|r| r.deserialize::<BenchRecord>(Some(&headers)));
        match parsed {
            Ok(record) => records.push(record),
            Err(e) => errors.push(RowError { row: i + 1, message: e.to_string() }),
        }
    }
    Ok((records, errors))
}
