use super::{validate_images, Dataset, DatasetError, PredictionSet};

pub fn parse_ground_truth(bytes: &[u8]) -> Result<Dataset, DatasetError> {
    let dataset: Dataset = serde_json::from_slice(bytes)?;
    check(validate_images(&dataset.images, true))?;
    Ok(dataset)
}

/// Parses a prediction file. Every detected unit must belong to exactly one
/// predicted block.
pub fn parse_predictions(bytes: &[u8]) -> Result<PredictionSet, DatasetError> {
    let preds: PredictionSet = serde_json::from_slice(bytes)?;
    check(validate_images(&preds.images, true))?;
    Ok(preds)
}

/// Parses detections in the prediction schema. `blocks` may be absent and any
/// blocks present are discarded.
pub fn parse_detections(bytes: &[u8]) -> Result<PredictionSet, DatasetError> {
    let mut preds: PredictionSet = serde_json::from_slice(bytes)?;
    for img in &mut preds.images {
        img.blocks.clear();
    }
    check(validate_images(&preds.images, false))?;
    Ok(preds)
}

pub fn serialize_ground_truth(d: &Dataset) -> String {
    let mut s = serde_json::to_string_pretty(d).expect("dataset serializes");
    s.push('\n');
    s
}

pub fn serialize_predictions(p: &PredictionSet) -> String {
    let mut s = serde_json::to_string_pretty(p).expect("predictions serialize");
    s.push('\n');
    s
}

fn check(violations: Vec<super::Violation>) -> Result<(), DatasetError> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(DatasetError::Validation(violations))
    }
}
