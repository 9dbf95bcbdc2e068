//! Contextual text block detection toolkit.
//!
//! Detected text units (characters or words) are turned into tokens, a
//! successor-index classifier links each token to the unit that follows it in
//! reading order, and the resulting directed graph is split into ordered
//! blocks. The crate also scores block predictions against ground truth with
//! local accuracy, local continuity and global accuracy, and ships the
//! clustering and reading-order baselines.
//!
//! The guide in `book/` walks through each stage with runnable listings.

pub mod baselines;
pub mod dataset;
pub mod embeddings;
pub mod generator;
pub mod geometry;
pub mod inference;
pub mod metrics;
pub mod nn;

/// The array crate used in public signatures.
pub use ndarray;
