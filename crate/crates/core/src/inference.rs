//! End-to-end block prediction for detected units: tokens, attention stack,
//! index head, successor graph, ordered blocks.

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::{ContextualBlock, Id, ImageAnnotation, IntegralUnit};
use crate::embeddings::{build_tokens, ArchiveError, EmbeddingConfig, EmbeddingError, EmbeddingWeights, FeatureMap, Tensor, TensorArchive, TokenMatrix};
use crate::generator::{
    attention_forward, build_graph, class_confidence, extract_blocks, predict_indices, BlockPrediction, GeneratorError,
    GeneratorWeights, IndexAssignment, IndexGraph, ATTENTION_LAYERS,
};
use crate::geometry::Polygon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
}

impl InferenceError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, InferenceError::Embedding(EmbeddingError::Capacity { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub cfg: EmbeddingConfig,
    pub embedding: EmbeddingWeights,
    pub generator: GeneratorWeights,
}

impl Model {
    pub fn from_archive(a: &TensorArchive, cfg: EmbeddingConfig, channels: usize, heads: usize) -> Result<Self, InferenceError> {
        Ok(Model {
            cfg,
            embedding: EmbeddingWeights::from_archive(a, &cfg, channels)?,
            generator: GeneratorWeights::from_archive(a, &cfg, heads)?,
        })
    }
}

/// Names and shapes of every tensor a model archive must hold.
pub fn model_layout(cfg: &EmbeddingConfig, channels: usize) -> Vec<(String, Vec<usize>)> {
    let (d, t) = (cfg.d, cfg.token_dim());
    let mut out = vec![
        ("fe.W".to_owned(), vec![channels * cfg.roi * cfg.roi, d]),
        ("fe.b".to_owned(), vec![d]),
        ("se.W1".to_owned(), vec![7, d]),
        ("se.b1".to_owned(), vec![d]),
        ("se.W2".to_owned(), vec![d, d]),
        ("se.b2".to_owned(), vec![d]),
        ("iph.W".to_owned(), vec![t, cfg.n_index + 1]),
        ("iph.b".to_owned(), vec![cfg.n_index + 1]),
    ];
    for l in 0..ATTENTION_LAYERS {
        for m in ["q", "k", "v", "o", "f"] {
            out.push((format!("att.{l}.W{m}"), vec![t, t]));
            out.push((format!("att.{l}.b{m}"), vec![t]));
        }
        for ln in ["ln1", "ln2"] {
            out.push((format!("att.{l}.{ln}.g"), vec![t]));
            out.push((format!("att.{l}.{ln}.b"), vec![t]));
        }
    }
    out
}

/// A complete model archive of zeros.
pub fn zero_model_archive(cfg: &EmbeddingConfig, channels: usize) -> TensorArchive {
    let mut a = TensorArchive::new();
    for (name, shape) in model_layout(cfg, channels) {
        a.insert(name, Tensor::zeros(shape));
    }
    a
}

/// A complete model archive with weights uniform in `[-scale, scale]` and
/// layer-norm gains of one.
pub fn random_model_archive(cfg: &EmbeddingConfig, channels: usize, seed: u64, scale: f32) -> TensorArchive {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = TensorArchive::new();
    for (name, shape) in model_layout(cfg, channels) {
        let n: usize = shape.iter().product();
        let values = if name.ends_with(".g") {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.random_range(-scale..=scale)).collect()
        };
        a.insert(name, Tensor::new(shape, values).expect("layout shape"));
    }
    a
}

/// Reads `featmap.{image_id}` (`C x H0 x W0`) and `stride.{image_id}`, falling
/// back to the unsuffixed `featmap` and `stride`.
pub fn feature_map_from_archive(a: &TensorArchive, image_id: &str) -> Result<FeatureMap, InferenceError> {
    let keyed = format!("featmap.{image_id}");
    let (map_name, stride_name) = if a.contains(&keyed) {
        (keyed, format!("stride.{image_id}"))
    } else {
        ("featmap".to_owned(), "stride".to_owned())
    };
    let t = a.get(&map_name)?;
    let &[c, h, w] = t.shape() else {
        return Err(ArchiveError::Shape { name: map_name, expected: vec![0, 0, 0], found: t.shape().to_vec() }.into());
    };
    let data = Array3::from_shape_vec((c, h, w), t.values().iter().map(|&v| v as f64).collect())
        .expect("shape checked");
    Ok(FeatureMap::new(data, a.scalar_value(&stride_name)?)?)
}

/// Every intermediate of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub tokens: TokenMatrix,
    pub hidden: Array2<f64>,
    pub logits: Array2<f64>,
    pub assignment: IndexAssignment,
    pub graph: IndexGraph,
    pub blocks: BlockPrediction,
}

pub fn infer(units: &[Polygon], fm: &FeatureMap, model: &Model, seed: u64) -> Result<Inference, InferenceError> {
    let tokens = build_tokens(units, fm, &model.embedding, &model.cfg, seed)?;
    let hidden = attention_forward(tokens.data.view(), &model.generator)?;
    let (logits, assignment) = predict_indices(hidden.view(), &model.generator.head)?;
    let graph = build_graph(&assignment, &tokens);
    let blocks = extract_blocks(&graph);
    Ok(Inference { tokens, hidden, logits, assignment, graph, blocks })
}

/// Predicts blocks for one image of detections. Units classified "not a text"
/// are left out; kept units carry the softmax confidence of their predicted
/// class as `score`.
pub fn predict_image(detections: &ImageAnnotation, fm: &FeatureMap, model: &Model, seed: u64) -> Result<ImageAnnotation, InferenceError> {
    let polys: Vec<Polygon> = detections.units.iter().map(|u| u.polygon.clone()).collect();
    let run = infer(&polys, fm, model, seed)?;
    let confidence = class_confidence(&run.logits, &run.assignment);
    Ok(ImageAnnotation {
        image_id: detections.image_id.clone(),
        width: detections.width,
        height: detections.height,
        units: run
            .graph
            .vertices
            .iter()
            .map(|&i| IntegralUnit { score: Some(confidence[i]), text: None, ..detections.units[i].clone() })
            .collect(),
        blocks: run
            .blocks
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| ContextualBlock {
                block_id: Id(format!("b{k}")),
                units: b.iter().map(|&i| detections.units[i].unit_id.clone()).collect(),
            })
            .collect(),
    })
}
