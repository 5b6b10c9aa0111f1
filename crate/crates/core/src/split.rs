//! Split merit and the contract shared by all attribute observers.

use crate::error::{Error, Result};
use crate::stats::VarStats;

/// Relative tolerance on `parent.count == left.count + right.count`.
const COUNT_TOL: f64 = 1e-9;

/// Merits closer than this fraction of the parent variance count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// A candidate binary partition `x <= cut_point` / `x > cut_point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSuggestion {
    pub cut_point: f64,
    /// Variance reduction achieved by the partition.
    pub merit: f64,
    pub left: VarStats,
    pub right: VarStats,
}

/// Variance reduction of splitting `parent` into `left` and `right`:
/// `s²(parent) - |left|/|parent| s²(left) - |right|/|parent| s²(right)`.
///
/// Returns 0 when the parent holds at most one unit of weight.
pub fn variance_reduction(parent: &VarStats, left: &VarStats, right: &VarStats) -> Result<f64> {
    let n = parent.count();
    if (n - (left.count() + right.count())).abs() > COUNT_TOL * n.max(1.0) {
        return Err(Error::CountMismatch {
            parent: n,
            left: left.count(),
            right: right.count(),
        });
    }
    Ok(vr_unchecked(parent, left, right))
}

pub(crate) fn vr_unchecked(parent: &VarStats, left: &VarStats, right: &VarStats) -> f64 {
    let n = parent.count();
    if n <= 1.0 {
        return 0.0;
    }
    parent.variance() - left.count() / n * left.variance() - right.count() / n * right.variance()
}

/// Evaluates the partition whose left branch is `left`, deriving the right
/// branch from `total`. `None` when `left` is not a part of `total`.
pub(crate) fn evaluate(cut_point: f64, total: &VarStats, left: VarStats) -> Option<SplitSuggestion> {
    let right = total.difference(&left).ok()?;
    Some(SplitSuggestion {
        cut_point,
        merit: vr_unchecked(total, &left, &right),
        left,
        right,
    })
}

/// Keeps the first suggestion among tied merits; `parent_variance` sets the
/// scale of rounding noise.
pub(crate) fn keep_best(best: &mut Option<SplitSuggestion>, candidate: SplitSuggestion, parent_variance: f64) {
    match best {
        Some(b) if candidate.merit <= b.merit + TIE_TOL * parent_variance => {}
        _ => *best = Some(candidate),
    }
}

/// Per-feature monitor of `(x, y)` pairs that proposes split points.
pub trait AttributeObserver {
    /// Monitors one `(x, y)` pair with weight `w`.
    fn update(&mut self, x: f64, y: f64, w: f64) -> Result<()>;

    /// Best split the observer's structure supports, given the statistics of
    /// every monitored target. `None` when fewer than two candidate regions
    /// exist.
    fn best_split(&self, total: &VarStats) -> Option<SplitSuggestion>;

    /// Number of stored elements (tree nodes or hash slots).
    fn n_elements(&self) -> usize;
}

impl<T: AttributeObserver + ?Sized> AttributeObserver for Box<T> {
    fn update(&mut self, x: f64, y: f64, w: f64) -> Result<()> {
        (**self).update(x, y, w)
    }

    fn best_split(&self, total: &VarStats) -> Option<SplitSuggestion> {
        (**self).best_split(total)
    }

    fn n_elements(&self) -> usize {
        (**self).n_elements()
    }
}
