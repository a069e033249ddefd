//! Structural checks behind the RA upper bound: free and fixed edges, the
//! properties P1 to P7, the normalizing transformations, and blocks.

pub mod blocks;
pub mod edges;
pub mod normalize;
pub mod properties;

use num_rational::Rational64;
use thiserror::Error;

use crate::online::ra_expected_cost;
use crate::opt::{opt_size, OptError};
use crate::tree::{OnlineTreeInput, TreeError, VertexId};

pub use blocks::{
    block_cost_audit, block_routine, check_counting_identities, classify_blocks, theorem2_audit,
    theorem2_bound_chain, BlockAssignment, BlockCounts, BlockKind, BoundChain,
};
pub use edges::{all_edges, edge_status, good_triplets, EdgeStatus};
pub use normalize::{apply_step, normalize, normalize_step, NormalizeOutcome, StepOutput, StepReport};
pub use properties::{check_lemma4, check_lemma5, check_properties, Property, PropertyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("({v}, {u}) is not an arrival edge")]
    NotArrivalEdge { v: VertexId, u: VertexId },
    #[error("no optimal sets given")]
    NoOptimalSets,
    #[error("{0} already satisfied")]
    AlreadySatisfied(Property),
    #[error("precondition for {target} unmet: {reason}")]
    PreconditionUnmet { target: Property, reason: String },
    #[error("block {block} has no kind")]
    Unclassified { block: usize },
    #[error("counting identities violated: {0}")]
    Identity(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Opt(#[from] OptError),
}

/// `E[C_RA] / C_OPT`, exact.
pub fn ra_ratio(input: &OnlineTreeInput) -> Rational64 {
    crate::ratio(ra_expected_cost(input), opt_size(&input.view()))
}
