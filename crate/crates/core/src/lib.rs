//! Online dominating set on trees.
//!
//! Inputs reveal a tree one vertex at a time; online algorithms must keep a
//! dominating set of every prefix and may never drop a vertex. The crate has
//! the parity algorithms A and B and their uniform mixture RA, exact offline
//! optima, two lower-bound adversaries, and executable versions of the
//! structural arguments (free edges, normalizations, blocks) used to bound RA.

pub mod adversary;
pub mod analysis;
pub mod harness;
pub mod online;
pub mod opt;
pub mod tree;

pub use num_rational::Rational64;
pub use online::{OnlineAlgorithm, RaMixture, SelectionTrace};
pub use tree::{DominatingSet, OnlineTreeInput, TreeView, VertexId};

/// Exact ratio `num / den` for `den > 0`.
pub fn ratio(num: Rational64, den: usize) -> Rational64 {
    assert!(den > 0, "ratio with zero denominator");
    num / Rational64::from(den as i64)
}
