//! Lower-bound adversaries: an adaptive one against deterministic algorithms
//! and a path-plus-pendants one against randomized algorithms.

pub mod det;
pub mod rand;
