//! Local accuracy (LA), local continuity (LC) and global accuracy (GA) of
//! predicted blocks, micro-averaged over a dataset at one or more IoU
//! thresholds.
//!
//! Each threshold rebuilds the detection-to-ground-truth matching, so a unit
//! only counts as found when its box overlaps enough.

mod counts;
mod evaluate;
mod report;
mod schedule;

pub use counts::{global_accuracy, local_accuracy, local_continuity, AlignedImage, NgramCounts, Ratio, MAX_NGRAM};
pub use evaluate::{evaluate, evaluate_thresholds, IouMode, ThresholdResult};
pub use report::{MetricReport, ScheduleSummary, LC_AGGREGATION};
pub use schedule::IouSchedule;

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("prediction image {0} is not in the ground truth")]
    UnknownImage(String),
    #[error("invalid IoU schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
