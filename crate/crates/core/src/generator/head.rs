use ndarray::{Array2, ArrayView2, Axis};

use super::GeneratorError;
use crate::nn::{softmax_rows, Affine};

/// Predicted class per token; class `n_index` means "not a text".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexAssignment {
    pub classes: Vec<usize>,
    pub n_index: usize,
}

impl IndexAssignment {
    pub fn not_text(&self) -> usize {
        self.n_index
    }
}

/// Logits `hidden * W + b` and the per-row argmax, ties going to the lowest
/// class id.
pub fn predict_indices(hidden: ArrayView2<f64>, head: &Affine) -> Result<(Array2<f64>, IndexAssignment), GeneratorError> {
    if hidden.ncols() != head.input_dim() {
        return Err(GeneratorError::Shape(format!("hidden is {} wide, head expects {}", hidden.ncols(), head.input_dim())));
    }
    let logits = head.apply_rows(hidden);
    let classes = logits.axis_iter(Axis(0)).map(|row| argmax(row.iter().copied())).collect();
    Ok((logits, IndexAssignment { classes, n_index: head.output_dim() - 1 }))
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 || i == 0 {
            best = (i, v);
        }
    }
    best.0
}

/// Softmax probability of each token's predicted class.
pub fn class_confidence(logits: &Array2<f64>, assignment: &IndexAssignment) -> Vec<f64> {
    let mut p = logits.clone();
    softmax_rows(&mut p);
    assignment.classes.iter().enumerate().map(|(i, &c)| p[[i, c]]).collect()
}

/// Mean over tokens of `-log softmax(logits)[target]`.
pub fn cross_entropy(logits: ArrayView2<f64>, targets: &[usize]) -> Result<f64, GeneratorError> {
    if logits.nrows() != targets.len() {
        return Err(GeneratorError::Shape(format!("{} logit rows for {} targets", logits.nrows(), targets.len())));
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= logits.ncols()) {
        return Err(GeneratorError::Shape(format!("target class {t} out of range for {} classes", logits.ncols())));
    }
    if targets.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = logits
        .axis_iter(Axis(0))
        .zip(targets)
        .map(|(row, &t)| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_sum = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            log_sum - (row[t] - max)
        })
        .sum();
    Ok(total / targets.len() as f64)
}
