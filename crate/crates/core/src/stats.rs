//! Weighted incremental mean and variance that can be merged and subtracted.
//!
//! [`VarStats`] keeps the triple `(count, mean, m2)` where `count` is the sum of
//! observation weights and `m2` is the sum of weighted squared deviations from
//! the running mean. Single observations follow Welford's update; two partial
//! summaries combine with the parallel update of Chan et al., and the inverse of
//! that update recovers one part from the whole and the other part.
//!
//! With unit weights every operation reduces to its unweighted textbook form.

use std::ops::{Add, AddAssign};

use crate::error::{check_target, Error, Result};

/// Relative weight below which the result of a subtraction is treated as empty.
const EMPTY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VarStats {
    count: f64,
    mean: f64,
    m2: f64,
}

impl VarStats {
    /// The canonical empty summary.
    pub const EMPTY: VarStats = VarStats { count: 0.0, mean: 0.0, m2: 0.0 };

    pub fn new() -> Self {
        Self::EMPTY
    }

    /// Summary of a single observation `y` with weight `w`.
    pub fn single(y: f64, w: f64) -> Result<Self> {
        check_target(y, w)?;
        Ok(VarStats { count: w, mean: y, m2: 0.0 })
    }

    /// Rebuilds a summary from raw parts, validating the invariants.
    pub fn from_parts(count: f64, mean: f64, m2: f64) -> Result<Self> {
        if !(count.is_finite() && mean.is_finite() && m2.is_finite()) {
            return Err(Error::RejectedInput("statistics must be finite".into()));
        }
        if count < 0.0 || m2 < 0.0 {
            return Err(Error::RejectedInput(format!(
                "count ({count}) and m2 ({m2}) must be non-negative"
            )));
        }
        if count == 0.0 {
            return Ok(Self::EMPTY);
        }
        Ok(VarStats { count, mean, m2 })
    }

    /// Summary of unit-weight observations.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        let mut stats = Self::EMPTY;
        for y in values {
            stats.observe(y, 1.0)?;
        }
        Ok(stats)
    }

    pub fn count(&self) -> f64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0.0
    }

    /// Adds one observation with weight `w` (Welford's update with `n`
    /// replaced by the cumulative weight).
    pub fn observe(&mut self, y: f64, w: f64) -> Result<()> {
        check_target(y, w)?;
        if self.is_empty() {
            *self = VarStats { count: w, mean: y, m2: 0.0 };
            return Ok(());
        }
        let previous = self.count;
        self.count += w;
        let delta = y - self.mean;
        self.mean += delta * (w / self.count);
        // w * delta * (y - new_mean), written so it cannot round below zero
        self.m2 += w * delta * delta * (previous / self.count);
        Ok(())
    }

    /// Statistics of the union of the two summarized samples.
    pub fn merge(&self, other: &VarStats) -> VarStats {
        if other.is_empty() {
            return *self;
        }
        if self.is_empty() {
            return *other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        VarStats {
            count,
            // Same as (n_a * mean_a + n_b * mean_b) / n_ab, without the large products.
            mean: self.mean + delta * (other.count / count),
            m2: self.m2 + other.m2 + delta * delta * (self.count * other.count / count),
        }
    }

    /// Recovers the statistics of `A` given `self = A ∪ B` and `part = B`.
    ///
    /// `part` must have been merged into `self` at some point; that contract
    /// cannot be verified, only the weights are checked.
    pub fn difference(&self, part: &VarStats) -> Result<VarStats> {
        if part.is_empty() {
            return Ok(*self);
        }
        let count = self.count - part.count;
        let tol = EMPTY_EPS * self.count.max(part.count);
        if count < -tol {
            return Err(Error::Underflow { total: self.count, subtrahend: part.count });
        }
        if count <= tol {
            return Ok(Self::EMPTY);
        }
        // Rearranged (n_ab * mean_ab - n_b * mean_b) / n_a.
        let mean = self.mean + (self.mean - part.mean) * (part.count / count);
        let delta = part.mean - mean;
        let m2 = self.m2 - part.m2 - delta * delta * (count * part.count / self.count);
        Ok(VarStats { count, mean, m2: m2.max(0.0) })
    }

    /// Sample variance `m2 / (count - 1)`; zero while `count <= 1`.
    pub fn variance(&self) -> f64 {
        if self.count <= 1.0 {
            0.0
        } else {
            self.m2 / (self.count - 1.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

impl Add for VarStats {
    type Output = VarStats;

    fn add(self, rhs: VarStats) -> VarStats {
        self.merge(&rhs)
    }
}

impl AddAssign for VarStats {
    fn add_assign(&mut self, rhs: VarStats) {
        *self = self.merge(&rhs);
    }
}

impl<'a> AddAssign<&'a VarStats> for VarStats {
    fn add_assign(&mut self, rhs: &'a VarStats) {
        *self = self.merge(rhs);
    }
}
