use super::GeneratorError;
use crate::dataset::ImageAnnotation;
use crate::embeddings::TokenMatrix;
use crate::geometry::Matching;

/// Training target per token, in `[0, n_index]`.
pub type TargetVector = Vec<usize>;

/// Builds the successor-index targets for the detections behind `tokens`.
///
/// A token matched to a ground-truth unit targets the assigned index of the
/// token matched to that unit's successor. A unit that ends its block, or
/// whose successor went undetected, makes the token target its own index.
/// Unmatched tokens target the "not a text" class `n_index`.
pub fn build_targets(matching: &Matching, gt: &ImageAnnotation, tokens: &TokenMatrix, n_index: usize) -> Result<TargetVector, GeneratorError> {
    let r = tokens.rows();
    if tokens.assigned_indices.len() != r {
        return Err(GeneratorError::Inconsistent(format!("{} assigned indices for {r} tokens", tokens.assigned_indices.len())));
    }
    for p in &matching.pairs {
        if p.det >= r || p.gt >= gt.units.len() {
            return Err(GeneratorError::Inconsistent(format!(
                "pair (det {}, gt {}) outside {r} tokens / {} gt units",
                p.det,
                p.gt,
                gt.units.len()
            )));
        }
    }

    let mut successor = vec![None; gt.units.len()];
    for block in gt.block_positions() {
        for pair in block.windows(2) {
            successor[pair[0]] = Some(pair[1]);
        }
    }
    let det_for_gt = matching.det_for_gt(gt.units.len());
    let gt_for_det = matching.gt_for_detection(r);

    Ok((0..r)
        .map(|i| match gt_for_det[i] {
            None => n_index,
            Some(g) => match successor[g].and_then(|next| det_for_gt[next]) {
                Some(j) => tokens.assigned_indices[j],
                None => tokens.assigned_indices[i],
            },
        })
        .collect())
}
