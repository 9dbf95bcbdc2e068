use ndarray::{s, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{feature_embedding, indexing_embedding, roi_align, spatial_embedding, spatial_vector};
use super::{EmbeddingConfig, EmbeddingError, EmbeddingWeights, FeatureMap};
use crate::geometry::Polygon;

/// Integral text tokens: row `i` is `[feature | indexing | spatial]` for unit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenMatrix {
    pub data: Array2<f64>,
    pub assigned_indices: Vec<usize>,
    pub d: usize,
}

impl TokenMatrix {
    pub fn empty(d: usize) -> Self {
        TokenMatrix { data: Array2::zeros((0, 3 * d)), assigned_indices: Vec::new(), d }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    /// Token whose assigned index is `index`, if any.
    pub fn token_with_index(&self, index: usize) -> Option<usize> {
        self.assigned_indices.iter().position(|&a| a == index)
    }
}

/// Draws `count` distinct indices uniformly from `[0, n_index)`, reproducibly
/// for a given seed.
pub fn assign_indices(count: usize, n_index: usize, seed: u64) -> Result<Vec<usize>, EmbeddingError> {
    if count > n_index {
        return Err(EmbeddingError::Capacity { units: count, n_index });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, n_index, count).into_vec())
}

pub fn build_tokens(
    units: &[Polygon],
    fm: &FeatureMap,
    weights: &EmbeddingWeights,
    cfg: &EmbeddingConfig,
    seed: u64,
) -> Result<TokenMatrix, EmbeddingError> {
    cfg.validate()?;
    let d = cfg.d;
    let expected_in = fm.channels() * cfg.roi * cfg.roi;
    if weights.feature.input_dim() != expected_in || weights.feature.output_dim() != d {
        return Err(EmbeddingError::Shape {
            name: "fe.W".into(),
            expected: vec![expected_in, d],
            found: vec![weights.feature.input_dim(), weights.feature.output_dim()],
        });
    }
    if weights.spatial.second.output_dim() != d {
        return Err(EmbeddingError::Shape {
            name: "se.W2".into(),
            expected: vec![weights.spatial.first.output_dim(), d],
            found: vec![weights.spatial.second.input_dim(), weights.spatial.second.output_dim()],
        });
    }
    let assigned = assign_indices(units.len(), cfg.n_index, seed)?;

    let mut data = Array2::zeros((units.len(), 3 * d));
    for (i, (poly, &index)) in units.iter().zip(&assigned).enumerate() {
        let bounds = poly.bounds();
        let fe = feature_embedding(&roi_align(fm, &bounds, cfg.roi), &weights.feature);
        let ie = indexing_embedding(index, d);
        let se = spatial_embedding(&spatial_vector(&bounds), &weights.spatial);
        let mut row = data.row_mut(i);
        row.slice_mut(s![0..d]).assign(&fe);
        row.slice_mut(s![d..2 * d]).iter_mut().zip(ie).for_each(|(dst, v)| *dst = v);
        row.slice_mut(s![2 * d..3 * d]).assign(&se);
    }
    Ok(TokenMatrix { data, assigned_indices: assigned, d })
}
