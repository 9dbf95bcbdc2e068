use ndarray::{Array3, ArrayView3};

use super::EmbeddingError;
use crate::geometry::Rect;

/// Bilinear samples per bin along each axis.
pub const SAMPLING_RATIO: usize = 2;

/// Backbone features for one image, `C x H0 x W0`, with the image-pixel size
/// of one feature cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    data: Array3<f64>,
    stride: f64,
}

impl FeatureMap {
    pub fn new(data: Array3<f64>, stride: f64) -> Result<Self, EmbeddingError> {
        let (c, h, w) = data.dim();
        if c == 0 || h == 0 || w == 0 {
            return Err(EmbeddingError::FeatureMap(format!("empty feature map {c}x{h}x{w}")));
        }
        if !(stride.is_finite() && stride > 0.0) {
            return Err(EmbeddingError::FeatureMap(format!("stride must be positive, got {stride}")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(EmbeddingError::FeatureMap("non-finite feature value".into()));
        }
        Ok(FeatureMap { data, stride })
    }

    pub fn channels(&self) -> usize {
        self.data.dim().0
    }

    pub fn height(&self) -> usize {
        self.data.dim().1
    }

    pub fn width(&self) -> usize {
        self.data.dim().2
    }

    pub fn stride(&self) -> f64 {
        self.stride
    }

    pub fn view(&self) -> ArrayView3<'_, f64> {
        self.data.view()
    }

    /// Bilinear value of channel `c` at continuous feature coordinates, where
    /// cell `(i, j)` sits at `(i, j)`. Coordinates clamp to the map edge.
    pub fn sample(&self, c: usize, y: f64, x: f64) -> f64 {
        let (_, h, w) = self.data.dim();
        let y = y.clamp(0.0, (h - 1) as f64);
        let x = x.clamp(0.0, (w - 1) as f64);
        let (y0, x0) = (y.floor() as usize, x.floor() as usize);
        let (y1, x1) = ((y0 + 1).min(h - 1), (x0 + 1).min(w - 1));
        let (ly, lx) = (y - y0 as f64, x - x0 as f64);
        let d = &self.data;
        (1.0 - ly) * ((1.0 - lx) * d[[c, y0, x0]] + lx * d[[c, y0, x1]])
            + ly * ((1.0 - lx) * d[[c, y1, x0]] + lx * d[[c, y1, x1]])
    }
}

/// Pools the box into a `C x R x R` grid.
///
/// The box is mapped to feature coordinates without rounding (pixel `p` lands
/// at `p / stride - 0.5`), cut into `R x R` bins, and each bin averages a
/// `2 x 2` lattice of bilinear samples placed at its interior quarter points.
pub fn roi_align(fm: &FeatureMap, rect: &Rect, grid: usize) -> Array3<f64> {
    let s = fm.stride();
    let (fx1, fy1) = (rect.x1 / s - 0.5, rect.y1 / s - 0.5);
    let bin_w = rect.width() / s / grid as f64;
    let bin_h = rect.height() / s / grid as f64;
    let n = SAMPLING_RATIO as f64;

    let mut out = Array3::zeros((fm.channels(), grid, grid));
    for c in 0..fm.channels() {
        for by in 0..grid {
            for bx in 0..grid {
                let mut acc = 0.0;
                for sy in 0..SAMPLING_RATIO {
                    let y = fy1 + bin_h * (by as f64 + (sy as f64 + 0.5) / n);
                    for sx in 0..SAMPLING_RATIO {
                        let x = fx1 + bin_w * (bx as f64 + (sx as f64 + 0.5) / n);
                        acc += fm.sample(c, y, x);
                    }
                }
                out[[c, by, bx]] = acc / (n * n);
            }
        }
    }
    out
}
