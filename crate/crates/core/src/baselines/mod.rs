//! Comparison systems: mean shift grouping of unit boxes followed by a
//! left-to-right, top-to-down sort inside each group.

mod mean_shift;
mod reading_order;

pub use mean_shift::{mean_shift_group, median_diagonal, MeanShiftResult};
pub use reading_order::reading_order_sort;

use crate::dataset::{ContextualBlock, Id, ImageAnnotation, IntegralUnit};
use crate::generator::BlockPrediction;
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    /// Bandwidth as a multiple of the median box diagonal.
    pub bandwidth_factor: f64,
    /// Stop once a mode moves less than this fraction of the layout diagonal.
    pub convergence_eps: f64,
    pub max_iterations: usize,
    /// Vertical overlap, relative to the shorter box, that puts two boxes on one line.
    pub line_overlap: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { bandwidth_factor: 1.5, convergence_eps: 1e-4, max_iterations: 100, line_overlap: 0.5 }
    }
}

/// Baseline grouping and ordering of one image's units.
///
/// Units are processed in unit-id order so the result does not depend on how
/// the input is listed. Returned positions index `units`; blocks are ordered by
/// their smallest unit id.
pub fn baseline_predict(units: &[IntegralUnit], cfg: &BaselineConfig) -> (BlockPrediction, MeanShiftResult) {
    let mut by_id: Vec<usize> = (0..units.len()).collect();
    by_id.sort_by(|&a, &b| units[a].unit_id.cmp(&units[b].unit_id));
    let rects: Vec<Rect> = by_id.iter().map(|&i| units[i].polygon.bounds()).collect();

    let clusters = mean_shift_group(&rects, cfg);
    let blocks = clusters
        .groups
        .iter()
        .map(|group| {
            let member_rects: Vec<Rect> = group.iter().map(|&k| rects[k]).collect();
            reading_order_sort(&member_rects, cfg.line_overlap)
                .into_iter()
                .map(|k| by_id[group[k]])
                .collect()
        })
        .collect();
    (BlockPrediction { blocks }, clusters)
}

/// Runs the baseline on an image and returns it in prediction-file form with
/// blocks named `b0`, `b1`, ...
pub fn baseline_image(image: &ImageAnnotation, cfg: &BaselineConfig) -> ImageAnnotation {
    let (pred, _) = baseline_predict(&image.units, cfg);
    ImageAnnotation {
        image_id: image.image_id.clone(),
        width: image.width,
        height: image.height,
        units: image.units.iter().map(|u| IntegralUnit { text: None, ..u.clone() }).collect(),
        blocks: pred
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| ContextualBlock {
                block_id: Id(format!("b{k}")),
                units: b.iter().map(|&i| image.units[i].unit_id.clone()).collect(),
            })
            .collect(),
    }
}
