use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{Dataset, Id, ImageAnnotation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ViolationKind {
    #[error("duplicate image_id")]
    DuplicateImageId,
    #[error("width and height must be positive, got {width}x{height}")]
    NonPositiveSize { width: i64, height: i64 },
    #[error("duplicate unit_id {unit}")]
    DuplicateUnitId { unit: Id },
    #[error("unit {unit} vertex {vertex} at ({x}, {y}) outside image bounds")]
    VertexOutOfBounds { unit: Id, vertex: usize, x: f64, y: f64 },
    #[error("unit {unit} polygon has zero area")]
    ZeroArea { unit: Id },
    #[error("unit {unit} polygon is not simple")]
    SelfIntersecting { unit: Id },
    #[error("unit {unit} has a non-finite score")]
    BadScore { unit: Id },
    #[error("duplicate block_id {block}")]
    DuplicateBlockId { block: Id },
    #[error("block {block} is empty")]
    EmptyBlock { block: Id },
    #[error("block {block} lists unit {unit} more than once")]
    RepeatedUnitInBlock { block: Id, unit: Id },
    #[error("block {block} references unknown unit {unit}")]
    UnknownUnit { block: Id, unit: Id },
    #[error("unit in multiple blocks: {unit}")]
    UnitInMultipleBlocks { unit: Id },
    #[error("unit {unit} is not in any block")]
    UnitInNoBlock { unit: Id },
}

/// One broken invariant, located by image and field path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub image_id: Id,
    pub field: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "image {}: {}: {}", self.image_id, self.field, self.kind)
    }
}

/// Lists every invariant violation in `d`; an empty list means the dataset is
/// valid.
pub fn validate_dataset(d: &Dataset) -> Vec<Violation> {
    validate_images(&d.images, true)
}

/// Checks images against the annotation invariants. With `require_blocks`
/// every unit must sit in exactly one block; without it, units may be loose
/// (detection files).
pub fn validate_images(images: &[ImageAnnotation], require_blocks: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, img) in images.iter().enumerate() {
        if !seen.insert(&img.image_id) {
            out.push(Violation {
                image_id: img.image_id.clone(),
                field: format!("images[{i}].image_id"),
                kind: ViolationKind::DuplicateImageId,
            });
        }
        validate_image(img, require_blocks, &mut out);
    }
    out
}

fn validate_image(img: &ImageAnnotation, require_blocks: bool, out: &mut Vec<Violation>) {
    let mut push = |field: String, kind| out.push(Violation { image_id: img.image_id.clone(), field, kind });

    if img.width <= 0 || img.height <= 0 {
        push("width/height".into(), ViolationKind::NonPositiveSize { width: img.width, height: img.height });
    }
    let (w, h) = (img.width as f64, img.height as f64);

    let mut unit_ids: HashMap<&Id, usize> = HashMap::new();
    for (ui, unit) in img.units.iter().enumerate() {
        let field = format!("units[{ui}]");
        if unit_ids.insert(&unit.unit_id, ui).is_some() {
            push(format!("{field}.unit_id"), ViolationKind::DuplicateUnitId { unit: unit.unit_id.clone() });
        }
        for (vi, p) in unit.polygon.vertices().iter().enumerate() {
            if !(0.0..=w).contains(&p.x) || !(0.0..=h).contains(&p.y) {
                push(
                    format!("{field}.polygon[{vi}]"),
                    ViolationKind::VertexOutOfBounds { unit: unit.unit_id.clone(), vertex: vi, x: p.x, y: p.y },
                );
            }
        }
        if unit.polygon.area() == 0.0 {
            push(format!("{field}.polygon"), ViolationKind::ZeroArea { unit: unit.unit_id.clone() });
        }
        if !unit.polygon.is_simple() {
            push(format!("{field}.polygon"), ViolationKind::SelfIntersecting { unit: unit.unit_id.clone() });
        }
        if unit.score.is_some_and(|s| !s.is_finite()) {
            push(format!("{field}.score"), ViolationKind::BadScore { unit: unit.unit_id.clone() });
        }
    }

    let mut block_ids = HashSet::new();
    let mut owner: HashMap<&Id, usize> = HashMap::new();
    for (bi, block) in img.blocks.iter().enumerate() {
        let field = format!("blocks[{bi}]");
        if !block_ids.insert(&block.block_id) {
            push(format!("{field}.block_id"), ViolationKind::DuplicateBlockId { block: block.block_id.clone() });
        }
        if block.units.is_empty() {
            push(format!("{field}.units"), ViolationKind::EmptyBlock { block: block.block_id.clone() });
        }
        let mut in_block = HashSet::new();
        for (k, uid) in block.units.iter().enumerate() {
            let ufield = format!("{field}.units[{k}]");
            if !unit_ids.contains_key(uid) {
                push(ufield, ViolationKind::UnknownUnit { block: block.block_id.clone(), unit: uid.clone() });
                continue;
            }
            if !in_block.insert(uid) {
                push(ufield, ViolationKind::RepeatedUnitInBlock { block: block.block_id.clone(), unit: uid.clone() });
                continue;
            }
            match owner.get(uid) {
                Some(&prev) if prev != bi => {
                    push(ufield, ViolationKind::UnitInMultipleBlocks { unit: uid.clone() });
                }
                _ => {
                    owner.insert(uid, bi);
                }
            }
        }
    }

    if require_blocks {
        for (ui, unit) in img.units.iter().enumerate() {
            if !owner.contains_key(&unit.unit_id) {
                push(format!("units[{ui}]"), ViolationKind::UnitInNoBlock { unit: unit.unit_id.clone() });
            }
        }
    }
}
