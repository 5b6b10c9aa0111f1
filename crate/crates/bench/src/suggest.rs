//! One-shot split suggestion over an `x,y` CSV file.

use std::io::Read;

use serde::{Deserialize, Serialize};
use splitobs::{RadiusPolicy, VarStats};

use crate::error::{BenchError, Result};
use crate::observer::ObserverConfig;

#[derive(Debug, Deserialize)]
struct Pair {
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuggestOutput {
    pub observer: String,
    pub cut_point: f64,
    pub merit: f64,
    pub left_count: f64,
    pub right_count: f64,
    pub left_mean: f64,
    pub right_mean: f64,
    pub n_elements: usize,
}

/// Combines `--observer` with the optional radius flags. The bare name `QO`
/// requires one of them; for other QO names they override the built-in policy.
pub fn observer_from_flags(name: &str, radius: Option<f64>, policy: Option<RadiusPolicy>) -> Result<ObserverConfig> {
    let explicit = match (radius, policy) {
        (Some(_), Some(_)) => {
            return Err(BenchError::Config("--radius and --radius-policy are mutually exclusive".into()))
        }
        (Some(r), None) => Some(RadiusPolicy::Fixed(r)),
        (None, p) => p,
    };
    if let Some(p) = explicit {
        p.resolve(1.0)?;
    }
    let config = if name == "QO" {
        ObserverConfig::Qo(explicit.ok_or_else(|| {
            BenchError::Config("observer QO needs --radius or --radius-policy".into())
        })?)
    } else {
        name.parse::<ObserverConfig>()?
    };
    match (config, explicit) {
        (config, None) => Ok(config),
        (ObserverConfig::Qo(_), Some(p)) => Ok(ObserverConfig::Qo(p)),
        (other, Some(_)) => Err(BenchError::Config(format!("observer {other} takes no radius"))),
    }
}

/// Reads `(x, y)` pairs from a headed two-column CSV.
pub fn read_pairs<R: Read>(source: R) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let mut pairs = Vec::new();
    for row in reader.deserialize::<Pair>() {
        let Pair { x, y } = row?;
        pairs.push((x, y));
    }
    Ok(pairs)
}

/// Streams the pairs through the observer and reports its best split.
pub fn suggest_split(pairs: &[(f64, f64)], config: &ObserverConfig) -> Result<SuggestOutput> {
    let feature_std = VarStats::from_values(pairs.iter().map(|p| p.0))?.std_dev();
    let mut observer = config.build(feature_std)?;
    let mut total = VarStats::new();
    for &(x, y) in pairs {
        observer.update(x, y, 1.0)?;
        total.observe(y, 1.0)?;
    }
    let best = observer.best_split(&total).ok_or_else(|| {
        BenchError::InsufficientData(format!(
            "{} found no split candidate in {} rows (at least two distinct stored values are needed)",
            config,
            pairs.len()
        ))
    })?;
    Ok(SuggestOutput {
        observer: config.name(),
        cut_point: best.cut_point,
        merit: best.merit,
        left_count: best.left.count(),
        right_count: best.right.count(),
        left_mean: best.left.mean(),
        right_mean: best.right.mean(),
        n_elements: observer.n_elements(),
    })
}
