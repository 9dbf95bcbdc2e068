use ndarray::{Array1, Array3};

use crate::nn::Affine;

/// Flattens the pooled grid channel-major (then row, then column) and applies
/// the projection.
pub fn feature_embedding(grid: &Array3<f64>, projection: &Affine) -> Array1<f64> {
    let flat: Array1<f64> = grid.iter().copied().collect();
    projection.apply(flat.view())
}
