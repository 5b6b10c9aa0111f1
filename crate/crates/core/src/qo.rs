//! Quantization Observer (QO).
//!
//! Each feature value is projected to the integer slot `h = floor(x / r)` for a
//! quantization radius `r`. A slot keeps the weighted sum of its feature values
//! and the robust statistics of its targets, so insertion is a single hash
//! update. A split query sorts the slot keys, accumulates the target
//! statistics left to right and evaluates the midpoint between the prototypes
//! (mean feature value) of every pair of consecutive slots.

use std::collections::HashMap;
use std::fmt;

use crate::error::{check_observation, Error, Result};
use crate::split::{evaluate, keep_best, AttributeObserver, SplitSuggestion};
use crate::stats::VarStats;

/// Radius used when a data-driven policy resolves to zero.
pub const FALLBACK_RADIUS: f64 = 0.01;

/// Slot index `floor(x / r)`.
pub fn hash_slot(x: f64, radius: f64) -> Result<i64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Config(format!("quantization radius {radius} must be positive and finite")));
    }
    if !x.is_finite() {
        return Err(Error::RejectedInput(format!("feature value {x} is not finite")));
    }
    let h = (x / radius).floor();
    // i64::MAX as f64 rounds up to 2^63, which is itself out of range.
    if h < i64::MIN as f64 || h >= i64::MAX as f64 {
        return Err(Error::RejectedInput(format!(
            "feature value {x} overflows the slot index range for radius {radius}"
        )));
    }
    Ok(h as i64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QoSlot {
    /// Weighted sum of the feature values in the slot.
    pub sum_x: f64,
    /// Target statistics of the slot members.
    pub stats: VarStats,
}

impl QoSlot {
    /// Weighted mean feature value of the slot.
    pub fn prototype(&self) -> f64 {
        self.sum_x / self.stats.count()
    }
}

#[derive(Debug, Clone)]
pub struct QoObserver {
    radius: f64,
    slots: HashMap<i64, QoSlot>,
}

impl QoObserver {
    pub fn new(radius: f64) -> Result<Self> {
        hash_slot(0.0, radius)?;
        Ok(QoObserver { radius, slots: HashMap::new() })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn slot(&self, key: i64) -> Option<&QoSlot> {
        self.slots.get(&key)
    }

    /// Slots in ascending key order.
    pub fn sorted_slots(&self) -> Vec<(i64, QoSlot)> {
        let mut slots: Vec<(i64, QoSlot)> = self.slots.iter().map(|(&k, &s)| (k, s)).collect();
        slots.sort_unstable_by_key(|&(k, _)| k);
        slots
    }
}

impl AttributeObserver for QoObserver {
    fn update(&mut self, x: f64, y: f64, w: f64) -> Result<()> {
        check_observation(x, y, w)?;
        let h = hash_slot(x, self.radius)?;
        match self.slots.get_mut(&h) {
            Some(slot) => {
                slot.sum_x += x * w;
                slot.stats.observe(y, w)?;
            }
            None => {
                self.slots.insert(h, QoSlot { sum_x: x * w, stats: VarStats::single(y, w)? });
            }
        }
        Ok(())
    }

    fn best_split(&self, total: &VarStats) -> Option<SplitSuggestion> {
        if self.slots.len() < 2 {
            return None;
        }
        let mut best = None;
        let scale = total.variance();
        let mut left = VarStats::EMPTY;
        let mut prev_prototype = None;
        for (_, slot) in self.sorted_slots() {
            let prototype = slot.prototype();
            if let Some(prev) = prev_prototype {
                if let Some(candidate) = evaluate((prev + prototype) / 2.0, total, left) {
                    keep_best(&mut best, candidate, scale);
                }
            }
            prev_prototype = Some(prototype);
            left += slot.stats;
        }
        best
    }

    fn n_elements(&self) -> usize {
        self.slots.len()
    }
}

/// How the quantization radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusPolicy {
    Fixed(f64),
    /// Feature standard deviation divided by the given value.
    StdFraction(f64),
}

impl RadiusPolicy {
    /// Resolves the policy against the feature's standard deviation.
    ///
    /// A standard-deviation policy that yields zero or a non-finite radius
    /// falls back to [`FALLBACK_RADIUS`].
    pub fn resolve(&self, sample_std: f64) -> Result<f64> {
        match *self {
            RadiusPolicy::Fixed(r) if r > 0.0 && r.is_finite() => Ok(r),
            RadiusPolicy::Fixed(r) => Err(Error::Config(format!("fixed radius {r} must be positive and finite"))),
            RadiusPolicy::StdFraction(k) if !(k > 0.0 && k.is_finite()) => {
                Err(Error::Config(format!("standard deviation divisor {k} must be positive and finite")))
            }
            RadiusPolicy::StdFraction(k) => {
                let r = sample_std / k;
                if r > 0.0 && r.is_finite() {
                    Ok(r)
                } else {
                    Ok(FALLBACK_RADIUS)
                }
            }
        }
    }
}

impl fmt::Display for RadiusPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusPolicy::Fixed(r) => write!(f, "fixed:{r}"),
            RadiusPolicy::StdFraction(k) => write!(f, "std_div:{k}"),
        }
    }
}

impl std::str::FromStr for RadiusPolicy {
    type Err = Error;

    /// Parses `fixed:<r>` or `std_div:<k>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("radius policy {s:?} is not of the form kind:value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("radius policy value {value:?} is not a number")))?;
        let policy = match kind.trim() {
            "fixed" => RadiusPolicy::Fixed(value),
            "std_div" => RadiusPolicy::StdFraction(value),
            other => return Err(Error::Config(format!("unknown radius policy kind {other:?}"))),
        };
        // validate
        policy.resolve(1.0)?;
        Ok(policy)
    }
}
