use std::cmp::Ordering;

use super::{overlap, GeometryError, Polygon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

/// One-to-one assignment of detections to ground-truth units. Ids are the
/// positions in the slices handed to [`match_detections`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    pub pairs: Vec<MatchPair>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_gt: Vec<usize>,
}

impl Matching {
    /// `gt_for_det[d]` is the ground-truth id matched to detection `d`.
    pub fn gt_for_detection(&self, n_det: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_det];
        for p in &self.pairs {
            out[p.det] = Some(p.gt);
        }
        out
    }

    pub fn det_for_gt(&self, n_gt: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_gt];
        for p in &self.pairs {
            out[p.gt] = Some(p.det);
        }
        out
    }
}

/// A detection/ground-truth pair with non-zero overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IouCandidate {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

/// All pairs with positive IoU, found with a bounding-box prefilter. Computing
/// this once lets callers match at several thresholds.
pub fn pairwise_ious(dets: &[Polygon], gts: &[Polygon]) -> Vec<IouCandidate> {
    let det_bounds: Vec<_> = dets.iter().map(Polygon::bounds).collect();
    let gt_bounds: Vec<_> = gts.iter().map(Polygon::bounds).collect();
    let mut out = Vec::new();
    for (d, db) in det_bounds.iter().enumerate() {
        for (g, gb) in gt_bounds.iter().enumerate() {
            if !db.intersects(gb) {
                continue;
            }
            let o = overlap(&dets[d], &gts[g]);
            if o.iou > 0.0 {
                out.push(IouCandidate { det: d, gt: g, iou: o.iou });
            }
        }
    }
    out
}

/// Greedy one-to-one matching: candidates at or above `threshold`, taken in
/// descending IoU order, ties by lower gt id then lower det id.
pub fn greedy_match(n_det: usize, n_gt: usize, candidates: &[IouCandidate], threshold: f64) -> Result<Matching, GeometryError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(GeometryError::BadThreshold(threshold));
    }
    let mut eligible: Vec<&IouCandidate> = candidates.iter().filter(|c| c.iou >= threshold).collect();
    eligible.sort_by(|a, b| {
        b.iou
            .total_cmp(&a.iou)
            .then(a.gt.cmp(&b.gt))
            .then(a.det.cmp(&b.det))
    });

    let mut det_used = vec![false; n_det];
    let mut gt_used = vec![false; n_gt];
    let mut pairs = Vec::new();
    for c in eligible {
        if det_used[c.det] || gt_used[c.gt] {
            continue;
        }
        det_used[c.det] = true;
        gt_used[c.gt] = true;
        pairs.push(MatchPair { det: c.det, gt: c.gt, iou: c.iou });
    }
    pairs.sort_by(|a, b| a.det.cmp(&b.det).then(Ordering::Equal));
    Ok(Matching {
        pairs,
        unmatched_detections: (0..n_det).filter(|&d| !det_used[d]).collect(),
        unmatched_gt: (0..n_gt).filter(|&g| !gt_used[g]).collect(),
    })
}

pub fn match_detections(dets: &[Polygon], gts: &[Polygon], threshold: f64) -> Result<Matching, GeometryError> {
    greedy_match(dets.len(), gts.len(), &pairwise_ious(dets, gts), threshold)
}
