//! Attribute observers for split-point discovery over numerical features in
//! online regression trees.
//!
//! Three observers are provided, all built on mergeable and subtractable
//! incremental variance statistics ([`VarStats`]):
//!
//! * [`EbstObserver`]: the Extended Binary Search Tree, optionally truncating
//!   its inputs to a fixed number of decimal places (TE-BST).
//! * [`QoObserver`]: the Quantization Observer, which hashes each feature value
//!   into a slot `floor(x / r)` and proposes cut points between consecutive
//!   slot prototypes.
//!
//! The [`datagen`] module reproduces a synthetic benchmark protocol for
//! comparing observers.

pub mod datagen;
pub mod ebst;
mod error;
pub mod qo;
pub mod split;
pub mod stats;

pub use ebst::{tebst_truncate, EbstObserver};
pub use error::{Error, Result};
pub use qo::{hash_slot, QoObserver, QoSlot, RadiusPolicy};
pub use split::{variance_reduction, AttributeObserver, SplitSuggestion};
pub use stats::VarStats;
