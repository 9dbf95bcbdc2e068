//! Ground-truth and prediction files: schema types, parsing, validation and
//! summary statistics.
//!
//! Both file kinds are UTF-8 JSON documents with a top-level `images` array.
//! Each image lists its `units` (polygon plus optional text or score) and its
//! `blocks`; a block's `units` array is the reading order.

mod io;
mod stats;
mod validate;

pub use io::{parse_detections, parse_ground_truth, parse_predictions, serialize_ground_truth, serialize_predictions};
pub use stats::{compute_stats, DatasetStats};
pub use validate::{validate_dataset, validate_images, Violation, ViolationKind};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::geometry::Polygon;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{} validation error(s); first: {}", .0.len(), .0[0])]
    Validation(Vec<Violation>),
    #[error("empty dataset")]
    Empty,
}

impl From<serde_json::Error> for DatasetError {
    fn from(e: serde_json::Error) -> Self {
        DatasetError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Identifier for images, units and blocks. Files may use JSON strings or
/// integers; both are held as text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Id(pub String);

impl Id {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_owned())
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(s)
    }
}

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        Ok(match Raw::deserialize(de)? {
            Raw::Int(i) => Id(i.to_string()),
            Raw::Text(s) => Id(s),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Character,
    #[default]
    Word,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralUnit {
    pub unit_id: Id,
    pub polygon: Polygon,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl IntegralUnit {
    pub fn new(unit_id: impl Into<Id>, polygon: Polygon) -> Self {
        IntegralUnit { unit_id: unit_id.into(), polygon, text: None, score: None }
    }
}

/// Unit ids in reading order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualBlock {
    pub block_id: Id,
    pub units: Vec<Id>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageAnnotation {
    pub image_id: Id,
    pub width: i64,
    pub height: i64,
    pub units: Vec<IntegralUnit>,
    #[serde(default)]
    pub blocks: Vec<ContextualBlock>,
}

impl ImageAnnotation {
    pub fn unit_index(&self) -> std::collections::HashMap<&Id, usize> {
        self.units.iter().enumerate().map(|(i, u)| (&u.unit_id, i)).collect()
    }

    /// Blocks as sequences of positions into `units`. Unknown ids are skipped;
    /// validated images have none.
    pub fn block_positions(&self) -> Vec<Vec<usize>> {
        let index = self.unit_index();
        self.blocks
            .iter()
            .map(|b| b.units.iter().filter_map(|id| index.get(id).copied()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    #[serde(default)]
    pub granularity: Granularity,
    pub images: Vec<ImageAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub images: Vec<ImageAnnotation>,
}

impl PredictionSet {
    /// The ground truth re-expressed as predictions (texts dropped).
    pub fn from_ground_truth(gt: &Dataset) -> Self {
        let images = gt
            .images
            .iter()
            .map(|img| ImageAnnotation {
                units: img
                    .units
                    .iter()
                    .map(|u| IntegralUnit { text: None, ..u.clone() })
                    .collect(),
                ..img.clone()
            })
            .collect();
        PredictionSet { images }
    }
}
