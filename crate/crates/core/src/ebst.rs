//! Extended Binary Search Tree observer (E-BST) and its truncating variant.
//!
//! Every distinct feature value becomes a node. A node accumulates the target
//! statistics of all observations `x <= threshold` that were routed through
//! it, so an in-order walk carrying the statistics inherited from ancestors
//! yields the left-branch statistics of every threshold.
//!
//! The tree is not balanced. Nodes live in an arena and every walk is
//! iterative, so sorted insertion (a degenerate chain) is slow but safe.

use crate::error::{check_observation, Result};
use crate::split::{evaluate, keep_best, AttributeObserver, SplitSuggestion};
use crate::stats::VarStats;

/// Drops fractional digits beyond `digits`, rounding toward zero.
pub fn tebst_truncate(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let truncated = (x.abs() * scale).floor() / scale;
    truncated.copysign(x)
}

#[derive(Debug, Clone)]
struct Node {
    threshold: f64,
    stats_le: VarStats,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct EbstObserver {
    nodes: Vec<Node>,
    truncation_digits: Option<u32>,
}

impl EbstObserver {
    /// Plain E-BST.
    pub fn new() -> Self {
        Self::default()
    }

    /// TE-BST: inputs are truncated to `digits` decimal places before insertion.
    pub fn truncated(digits: u32) -> Self {
        EbstObserver { nodes: Vec::new(), truncation_digits: Some(digits) }
    }

    pub fn truncation_digits(&self) -> Option<u32> {
        self.truncation_digits
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Thresholds in ascending order.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len());
        self.walk_in_order(|node, _| out.push(node.threshold));
        out
    }

    /// Length of the longest root-to-leaf path (0 for an empty tree).
    pub fn height(&self) -> usize {
        let mut height = 0;
        let mut stack: Vec<(usize, usize)> = self.root().map(|r| (r, 1)).into_iter().collect();
        while let Some((idx, depth)) = stack.pop() {
            height = height.max(depth);
            let node = &self.nodes[idx];
            stack.extend(node.left.map(|c| (c, depth + 1)));
            stack.extend(node.right.map(|c| (c, depth + 1)));
        }
        height
    }

    fn root(&self) -> Option<usize> {
        if self.nodes.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    fn push(&mut self, threshold: f64, y: f64, w: f64) -> Result<usize> {
        self.nodes.push(Node {
            threshold,
            stats_le: VarStats::single(y, w)?,
            left: None,
            right: None,
        });
        Ok(self.nodes.len() - 1)
    }

    /// Visits nodes in ascending threshold order together with the statistics
    /// of every observation below the node's subtree, accumulated from the
    /// ancestors where the walk turned right.
    fn walk_in_order<F: FnMut(&Node, &VarStats)>(&self, mut visit: F) {
        let mut stack: Vec<(usize, VarStats)> = Vec::new();
        let mut cursor = self.root().map(|r| (r, VarStats::EMPTY));
        loop {
            while let Some((idx, acc)) = cursor {
                stack.push((idx, acc));
                cursor = self.nodes[idx].left.map(|l| (l, acc));
            }
            let Some((idx, acc)) = stack.pop() else { break };
            let node = &self.nodes[idx];
            visit(node, &acc);
            cursor = node.right.map(|r| (r, acc + node.stats_le));
        }
    }
}

impl AttributeObserver for EbstObserver {
    fn update(&mut self, x: f64, y: f64, w: f64) -> Result<()> {
        check_observation(x, y, w)?;
        let x = match self.truncation_digits {
            Some(digits) => tebst_truncate(x, digits),
            None => x,
        };
        let Some(mut idx) = self.root() else {
            self.push(x, y, w)?;
            return Ok(());
        };
        loop {
            let node = &mut self.nodes[idx];
            if x <= node.threshold {
                node.stats_le.observe(y, w)?;
                if x == node.threshold {
                    return Ok(());
                }
                match node.left {
                    Some(l) => idx = l,
                    None => {
                        let child = self.push(x, y, w)?;
                        self.nodes[idx].left = Some(child);
                        return Ok(());
                    }
                }
            } else {
                match node.right {
                    Some(r) => idx = r,
                    None => {
                        let child = self.push(x, y, w)?;
                        self.nodes[idx].right = Some(child);
                        return Ok(());
                    }
                }
            }
        }
    }

    fn best_split(&self, total: &VarStats) -> Option<SplitSuggestion> {
        if self.nodes.len() < 2 {
            return None;
        }
        let mut best = None;
        let scale = total.variance();
        // the largest threshold leaves the right branch empty and is skipped
        let mut remaining = self.nodes.len();
        self.walk_in_order(|node, acc| {
            remaining -= 1;
            if remaining == 0 {
                return;
            }
            if let Some(candidate) = evaluate(node.threshold, total, *acc + node.stats_le) {
                keep_best(&mut best, candidate, scale);
            }
        });
        best
    }

    fn n_elements(&self) -> usize {
        self.nodes.len()
    }
}
