//! Contextual text block generator: the attention stack over tokens, the
//! successor-index head, training targets and loss, and the grouping of
//! predictions into ordered blocks.

mod attention;
mod graph;
mod head;
mod targets;
mod union_find;
mod weights;

pub use attention::{attention_forward, attention_forward_traced, AttentionTrace};
pub use graph::{build_graph, extract_blocks, BlockPrediction, IndexGraph};
pub use head::{class_confidence, cross_entropy, predict_indices, IndexAssignment};
pub use targets::{build_targets, TargetVector};
pub use union_find::DisjointSet;
pub use weights::{AttentionBlock, GeneratorWeights, ATTENTION_LAYERS, DEFAULT_HEADS};

use thiserror::Error;

use crate::embeddings::ArchiveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("token width {dim} is not divisible by {heads} heads")]
    Heads { dim: usize, heads: usize },
    #[error("inconsistent tokens and matching: {0}")]
    Inconsistent(String),
}
