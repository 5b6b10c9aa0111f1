//! Average ranks of observers across benchmark cells.
//!
//! Within each cell (one generated sample) observers are ranked per metric
//! with fractional ranks for ties; rank 1 is best. Merit is ranked
//! descending, every cost metric ascending.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::Result;
use crate::record::{read_records, BenchRecord, RowError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Merit,
    NElements,
    ObserveTime,
    QueryTime,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Merit, Metric::NElements, Metric::ObserveTime, Metric::QueryTime];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Merit => "merit",
            Metric::NElements => "n_elements",
            Metric::ObserveTime => "observe_time_s",
            Metric::QueryTime => "query_time_s",
        }
    }

    fn higher_is_better(&self) -> bool {
        matches!(self, Metric::Merit)
    }

    fn value(&self, r: &BenchRecord) -> f64 {
        match self {
            Metric::Merit => r.merit,
            Metric::NElements => r.n_elements as f64,
            Metric::ObserveTime => r.observe_time_s,
            Metric::QueryTime => r.query_time_s,
        }
    }
}

/// Standard fractional ranking (ties share the mean of their positions).
pub fn fractional_ranks(values: &[f64], descending: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        if descending {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank mean(i+1 ..= j+1)
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub metric: &'static str,
    pub observer: String,
    /// `None` for the average over every cell.
    #[serde(serialize_with = "size_or_all")]
    pub size: Option<usize>,
    pub mean_rank: f64,
    pub cells: usize,
}

fn size_or_all<S: serde::Serializer>(size: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match size {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_str("all"),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankSummary {
    pub rows: Vec<RankRow>,
}

impl RankSummary {
    pub fn mean_rank(&self, metric: Metric, observer: &str) -> Option<f64> {
        self.overall(metric).find(|r| r.observer == observer).map(|r| r.mean_rank)
    }

    /// Observer with the lowest overall mean rank for `metric`.
    pub fn best(&self, metric: Metric) -> Option<&str> {
        self.overall(metric)
            .min_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank))
            .map(|r| r.observer.as_str())
    }

    fn overall(&self, metric: Metric) -> impl Iterator<Item = &RankRow> {
        self.rows.iter().filter(move |r| r.metric == metric.name() && r.size.is_none())
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record(["metric", "observer", "size", "mean_rank", "cells"])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for RankSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for metric in Metric::ALL {
            let mut rows: Vec<&RankRow> = self.overall(metric).collect();
            if rows.is_empty() {
                continue;
            }
            rows.sort_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank));
            writeln!(f, "{}", metric.name())?;
            for row in rows {
                writeln!(f, "  {:<16} {:>7.3}  ({} cells)", row.observer, row.mean_rank, row.cells)?;
            }
        }
        Ok(())
    }
}

type CellKey = (String, String, String, u64, usize, u32);

/// Ranks observers within each cell and averages per metric, overall and per size.
pub fn rank_records(records: &[BenchRecord]) -> RankSummary {
    let mut cells: BTreeMap<CellKey, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        let key = (
            r.distribution.clone(),
            r.dist_params.clone(),
            r.target_fn.clone(),
            r.noise_fraction.to_bits(),
            r.size,
            r.repetition,
        );
        cells.entry(key).or_default().push(r);
    }

    let mut rows = Vec::new();
    for metric in Metric::ALL {
        // (observer, size) -> (rank sum, cells)
        let mut per_size: BTreeMap<(String, usize), (f64, usize)> = BTreeMap::new();
        let mut overall: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for ((.., size, _), members) in &cells {
            let values: Vec<f64> = members.iter().map(|r| metric.value(r)).collect();
            let ranks = fractional_ranks(&values, metric.higher_is_better());
            for (r, rank) in members.iter().zip(ranks) {
                let e = per_size.entry((r.observer.clone(), *size)).or_default();
                e.0 += rank;
                e.1 += 1;
                let e = overall.entry(r.observer.clone()).or_default();
                e.0 += rank;
                e.1 += 1;
            }
        }
        for (observer, (sum, n)) in overall {
            rows.push(RankRow { metric: metric.name(), observer, size: None, mean_rank: sum / n as f64, cells: n });
        }
        for ((observer, size), (sum, n)) in per_size {
            rows.push(RankRow { metric: metric.name(), observer, size: Some(size), mean_rank: sum / n as f64, cells: n });
        }
    }
    RankSummary { rows }
}

/// Parses a results file and ranks it; unparseable rows are returned
/// alongside the summary.
pub fn summarize<R: Read>(source: R) -> Result<(RankSummary, Vec<RowError>)> {
    let (records, errors) = read_records(source)?;
    Ok((rank_records(&records), errors))
}
