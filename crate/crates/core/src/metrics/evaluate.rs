use std::collections::{BTreeMap, HashMap};

use super::counts::{global_accuracy, local_accuracy, local_continuity, AlignedImage, NgramCounts, Ratio};
use super::{IouSchedule, MetricReport, MetricsError, ScheduleSummary};
use crate::dataset::{Dataset, ImageAnnotation, PredictionSet};
use crate::geometry::{greedy_match, pairwise_ious, IouCandidate, Matching, MatchPair, Polygon};

/// Which shape stands in for a unit when computing IoU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IouMode {
    #[default]
    Polygon,
    BoundingRect,
}

/// Dataset-level counts at one IoU threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThresholdResult {
    pub threshold: f64,
    pub la: Ratio,
    pub lc: NgramCounts,
    pub ga: Ratio,
}

impl ThresholdResult {
    fn add(&mut self, img: &AlignedImage) {
        self.la += local_accuracy(img);
        self.lc += local_continuity(img);
        self.ga += global_accuracy(img);
    }
}

/// An image prepared for matching: units sorted by id so results do not depend
/// on file order, plus the positive-IoU candidate pairs.
struct PreparedImage<'a> {
    gt: &'a ImageAnnotation,
    pred: Option<&'a ImageAnnotation>,
    gt_order: Vec<usize>,
    pred_order: Vec<usize>,
    candidates: Vec<IouCandidate>,
}

impl<'a> PreparedImage<'a> {
    fn new(gt: &'a ImageAnnotation, pred: Option<&'a ImageAnnotation>, mode: IouMode) -> Self {
        let gt_order = id_order(gt);
        let pred_order = pred.map_or_else(Vec::new, id_order);
        let shapes = |img: &ImageAnnotation, order: &[usize]| -> Vec<Polygon> {
            order
                .iter()
                .map(|&i| match mode {
                    IouMode::Polygon => img.units[i].polygon.clone(),
                    IouMode::BoundingRect => img.units[i].polygon.bounds().to_polygon(),
                })
                .collect()
        };
        let gt_shapes = shapes(gt, &gt_order);
        let pred_shapes = pred.map_or_else(Vec::new, |p| shapes(p, &pred_order));
        let candidates = pairwise_ious(&pred_shapes, &gt_shapes);
        PreparedImage { gt, pred, gt_order, pred_order, candidates }
    }

    fn aligned(&self, threshold: f64) -> Result<AlignedImage, MetricsError> {
        let sorted = greedy_match(self.pred_order.len(), self.gt_order.len(), &self.candidates, threshold)?;
        let matching = Matching {
            pairs: sorted
                .pairs
                .iter()
                .map(|p| MatchPair { det: self.pred_order[p.det], gt: self.gt_order[p.gt], iou: p.iou })
                .collect(),
            unmatched_detections: sorted.unmatched_detections.iter().map(|&d| self.pred_order[d]).collect(),
            unmatched_gt: sorted.unmatched_gt.iter().map(|&g| self.gt_order[g]).collect(),
        };
        Ok(AlignedImage::new(self.gt, self.pred, &matching))
    }
}

fn id_order(img: &ImageAnnotation) -> Vec<usize> {
    let mut order: Vec<usize> = (0..img.units.len()).collect();
    order.sort_by(|&a, &b| img.units[a].unit_id.cmp(&img.units[b].unit_id));
    order
}

fn prepare<'a>(gt: &'a Dataset, pred: &'a PredictionSet, mode: IouMode) -> Result<Vec<PreparedImage<'a>>, MetricsError> {
    let gt_ids: HashMap<_, _> = gt.images.iter().map(|i| (&i.image_id, i)).collect();
    let mut preds: HashMap<_, &ImageAnnotation> = HashMap::new();
    for p in &pred.images {
        if !gt_ids.contains_key(&p.image_id) {
            return Err(MetricsError::UnknownImage(p.image_id.to_string()));
        }
        preds.insert(&p.image_id, p);
    }
    Ok(gt.images.iter().map(|g| PreparedImage::new(g, preds.get(&g.image_id).copied(), mode)).collect())
}

/// Micro-averaged counts at each threshold. Images missing from `pred` count
/// as having no detections.
pub fn evaluate_thresholds(gt: &Dataset, pred: &PredictionSet, thresholds: &[f64], mode: IouMode) -> Result<Vec<ThresholdResult>, MetricsError> {
    let images = prepare(gt, pred, mode)?;
    thresholds
        .iter()
        .map(|&t| {
            let mut acc = ThresholdResult { threshold: t, ..Default::default() };
            for img in &images {
                acc.add(&img.aligned(t)?);
            }
            Ok(acc)
        })
        .collect()
}

/// Scores `pred` against `gt` under every schedule; each schedule reports the
/// per-threshold counts and the mean LA, LC and GA over its thresholds.
pub fn evaluate(gt: &Dataset, pred: &PredictionSet, schedules: &[IouSchedule], mode: IouMode) -> Result<MetricReport, MetricsError> {
    let mut all: Vec<f64> = schedules.iter().flat_map(|s| s.thresholds().iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let results: BTreeMap<u64, ThresholdResult> = evaluate_thresholds(gt, pred, &all, mode)?
        .into_iter()
        .map(|r| (r.threshold.to_bits(), r))
        .collect();

    let summaries = schedules
        .iter()
        .map(|s| {
            let per: Vec<ThresholdResult> = s.thresholds().iter().map(|t| results[&t.to_bits()]).collect();
            let mean = |f: fn(&ThresholdResult) -> f64| per.iter().map(f).sum::<f64>() / per.len() as f64;
            ScheduleSummary {
                name: s.name().to_owned(),
                la: mean(|r| r.la.value()),
                lc: mean(|r| r.lc.value()),
                ga: mean(|r| r.ga.value()),
                per_threshold: per,
            }
        })
        .collect();
    Ok(MetricReport { schedules: summaries })
}
