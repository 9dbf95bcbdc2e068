use crate::embeddings::{ArchiveError, EmbeddingConfig, TensorArchive};
use crate::nn::{Affine, LayerNorm};

use super::GeneratorError;

/// Number of stacked attention blocks.
pub const ATTENTION_LAYERS: usize = 6;

/// Default number of attention heads.
pub const DEFAULT_HEADS: usize = 8;

/// One pre-norm block: `u = x + MHSA(LN1(x))`, `y = u + Linear(LN2(u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionBlock {
    pub ln1: LayerNorm,
    pub query: Affine,
    pub key: Affine,
    pub value: Affine,
    pub output: Affine,
    pub ln2: LayerNorm,
    pub linear: Affine,
}

impl AttentionBlock {
    /// Zero projections with unit layer-norm gains; the block is an identity.
    pub fn zeros(dim: usize) -> Self {
        AttentionBlock {
            ln1: LayerNorm::identity(dim),
            query: Affine::zeros(dim, dim),
            key: Affine::zeros(dim, dim),
            value: Affine::zeros(dim, dim),
            output: Affine::zeros(dim, dim),
            ln2: LayerNorm::identity(dim),
            linear: Affine::zeros(dim, dim),
        }
    }

    fn from_archive(a: &TensorArchive, layer: usize, dim: usize) -> Result<Self, ArchiveError> {
        let p = |s: &str| format!("att.{layer}.{s}");
        let affine = |w: &str, b: &str| Affine::from_archive(a, &p(w), &p(b), dim, dim);
        let norm = |ln: &str| -> Result<LayerNorm, ArchiveError> {
            Ok(LayerNorm { gain: a.vector(&p(&format!("{ln}.g")), dim)?, shift: a.vector(&p(&format!("{ln}.b")), dim)? })
        };
        Ok(AttentionBlock {
            ln1: norm("ln1")?,
            query: affine("Wq", "bq")?,
            key: affine("Wk", "bk")?,
            value: affine("Wv", "bv")?,
            output: affine("Wo", "bo")?,
            ln2: norm("ln2")?,
            linear: affine("Wf", "bf")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorWeights {
    pub blocks: Vec<AttentionBlock>,
    /// Index prediction head, `3d x (n_index + 1)`.
    pub head: Affine,
    pub heads: usize,
}

impl GeneratorWeights {
    pub fn new(blocks: Vec<AttentionBlock>, head: Affine, heads: usize) -> Result<Self, GeneratorError> {
        let dim = head.input_dim();
        if heads == 0 || !dim.is_multiple_of(heads) {
            return Err(GeneratorError::Heads { dim, heads });
        }
        for (l, b) in blocks.iter().enumerate() {
            let dims = [
                b.query.input_dim(), b.query.output_dim(), b.key.input_dim(), b.key.output_dim(),
                b.value.input_dim(), b.value.output_dim(), b.output.input_dim(), b.output.output_dim(),
                b.linear.input_dim(), b.linear.output_dim(), b.ln1.gain.len(), b.ln1.shift.len(),
                b.ln2.gain.len(), b.ln2.shift.len(),
            ];
            if dims.iter().any(|&x| x != dim) {
                return Err(GeneratorError::Shape(format!("attention block {l} is not {dim}-wide")));
            }
        }
        Ok(GeneratorWeights { blocks, head, heads })
    }

    /// Identity attention stack and an all-zero head.
    pub fn zeros(cfg: &EmbeddingConfig, heads: usize) -> Result<Self, GeneratorError> {
        let dim = cfg.token_dim();
        Self::new(
            (0..ATTENTION_LAYERS).map(|_| AttentionBlock::zeros(dim)).collect(),
            Affine::zeros(dim, cfg.n_index + 1),
            heads,
        )
    }

    /// Reads `att.{l}.{Wq,bq,Wk,bk,Wv,bv,Wo,bo,Wf,bf}`, `att.{l}.{ln1,ln2}.{g,b}`
    /// for each of the six layers, plus `iph.W` and `iph.b`.
    pub fn from_archive(a: &TensorArchive, cfg: &EmbeddingConfig, heads: usize) -> Result<Self, GeneratorError> {
        let dim = cfg.token_dim();
        let blocks = (0..ATTENTION_LAYERS)
            .map(|l| AttentionBlock::from_archive(a, l, dim))
            .collect::<Result<Vec<_>, _>>()?;
        let head = Affine::from_archive(a, "iph.W", "iph.b", dim, cfg.n_index + 1)?;
        Self::new(blocks, head, heads)
    }

    pub fn dim(&self) -> usize {
        self.head.input_dim()
    }

    pub fn n_index(&self) -> usize {
        self.head.output_dim() - 1
    }
}
