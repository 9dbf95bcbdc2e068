//! Per-unit token construction: pooled visual features, sinusoidal encodings
//! of randomly assigned indices, and an MLP over box geometry, concatenated
//! into one `3d`-wide row per detected unit.

mod archive;
mod feature;
mod roi;
mod sinusoid;
mod spatial;
mod tokens;

pub use archive::{load_archive, ArchiveError, Tensor, TensorArchive, MAGIC};
pub use feature::feature_embedding;
pub use roi::{roi_align, FeatureMap, SAMPLING_RATIO};
pub use sinusoid::indexing_embedding;
pub use spatial::{spatial_embedding, spatial_vector, SpatialMlp};
pub use tokens::{assign_indices, build_tokens, TokenMatrix};

use thiserror::Error;

use crate::nn::Affine;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbeddingError {
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error("tensor {name}: expected shape {expected:?}, found {found:?}")]
    Shape { name: String, expected: Vec<usize>, found: Vec<usize> },
    #[error("{units} units exceed index capacity {n_index}")]
    Capacity { units: usize, n_index: usize },
    #[error("invalid embedding config: {0}")]
    Config(String),
    #[error("invalid feature map: {0}")]
    FeatureMap(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    /// Width of each of the three embeddings; tokens are `3d` wide.
    pub d: usize,
    /// Side of the pooled ROI grid.
    pub roi: usize,
    /// Number of index classes; the head adds one "not a text" class.
    pub n_index: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig { d: 64, roi: 7, n_index: 1000 }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        if self.d < 4 || !self.d.is_multiple_of(2) {
            return Err(EmbeddingError::Config(format!("d must be even and >= 4, got {}", self.d)));
        }
        if self.roi == 0 {
            return Err(EmbeddingError::Config("roi grid side must be >= 1".into()));
        }
        if self.n_index == 0 {
            return Err(EmbeddingError::Config("n_index must be >= 1".into()));
        }
        Ok(())
    }

    pub fn token_dim(&self) -> usize {
        3 * self.d
    }
}

/// Projections of the embedding extractor. The spatial MLP's hidden width
/// equals `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingWeights {
    pub feature: Affine,
    pub spatial: SpatialMlp,
}

impl EmbeddingWeights {
    /// Reads `fe.W`, `fe.b`, `se.W1`, `se.b1`, `se.W2`, `se.b2`, checking
    /// shapes against `cfg` and the feature channel count.
    pub fn from_archive(a: &TensorArchive, cfg: &EmbeddingConfig, channels: usize) -> Result<Self, EmbeddingError> {
        cfg.validate()?;
        let d = cfg.d;
        Ok(EmbeddingWeights {
            feature: Affine::from_archive(a, "fe.W", "fe.b", channels * cfg.roi * cfg.roi, d)?,
            spatial: SpatialMlp::from_archive(a, d, d)?,
        })
    }
}
