use ndarray::{Array1, ArrayView1};

use super::ArchiveError;
use crate::embeddings::TensorArchive;
use crate::geometry::Rect;
use crate::nn::{relu, Affine};

/// `(w, h, x1, y1, x2, y2, w * h)` of a box.
pub fn spatial_vector(r: &Rect) -> [f64; 7] {
    let (w, h) = (r.width(), r.height());
    [w, h, r.x1, r.y1, r.x2, r.y2, w * h]
}

/// Two rectified affine layers, `7 -> d_h -> d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMlp {
    pub first: Affine,
    pub second: Affine,
}

impl SpatialMlp {
    pub fn new(first: Affine, second: Affine) -> Result<Self, ArchiveError> {
        if first.input_dim() != 7 {
            return Err(ArchiveError::Shape {
                name: "se.W1".into(),
                expected: vec![7, first.output_dim()],
                found: vec![first.input_dim(), first.output_dim()],
            });
        }
        if second.input_dim() != first.output_dim() {
            return Err(ArchiveError::Shape {
                name: "se.W2".into(),
                expected: vec![first.output_dim(), second.output_dim()],
                found: vec![second.input_dim(), second.output_dim()],
            });
        }
        Ok(SpatialMlp { first, second })
    }

    pub fn from_archive(a: &TensorArchive, hidden: usize, d: usize) -> Result<Self, ArchiveError> {
        Self::new(
            Affine::from_archive(a, "se.W1", "se.b1", 7, hidden)?,
            Affine::from_archive(a, "se.W2", "se.b2", hidden, d)?,
        )
    }
}

/// `max(0, max(0, v W1 + b1) W2 + b2)`.
pub fn spatial_embedding(v: &[f64; 7], mlp: &SpatialMlp) -> Array1<f64> {
    let hidden = relu(mlp.first.apply(ArrayView1::from(&v[..])));
    relu(mlp.second.apply(hidden.view()))
}
