#![allow(dead_code)]

#[path = "../../../core/tests/common/mod.rs"]
pub mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctbkit::dataset::{serialize_ground_truth, serialize_predictions, Dataset, ImageAnnotation, IntegralUnit, PredictionSet};
use ctbkit::embeddings::{assign_indices, indexing_embedding, EmbeddingConfig, Tensor, TensorArchive};
use ctbkit::geometry::Rect;
use ctbkit::inference::zero_model_archive;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn ctbkit(args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_ctbkit")).args(args).output().expect("spawn ctbkit");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p
}

pub fn write_gt(dir: &Path, name: &str, d: &Dataset) -> PathBuf {
    write(dir, name, serialize_ground_truth(d))
}

pub fn write_pred(dir: &Path, name: &str, p: &PredictionSet) -> PathBuf {
    write(dir, name, serialize_predictions(p))
}

/// Small model shape used by the inference tests: tokens are 12 wide.
pub const SMALL: EmbeddingConfig = EmbeddingConfig { d: 4, roi: 2, n_index: 8 };
pub const SMALL_HEADS: usize = 3;

pub fn small_flags() -> Vec<String> {
    ["--d", "4", "--roi", "2", "--n-index", "8", "--heads", "3"].iter().map(|x| x.to_string()).collect()
}

/// One-channel zero feature map with stride 8, shared by every image.
pub fn zero_features() -> TensorArchive {
    let mut a = TensorArchive::new();
    a.insert("featmap", Tensor::zeros(vec![1, 8, 32]));
    a.insert("stride", Tensor::scalar(8.0));
    a
}

/// Two detections: `a` at x = 10, `b` at x = 100.
pub fn two_detections() -> PredictionSet {
    let unit = |id: &str, x: f64| IntegralUnit::new(id, Rect::new(x, 10.0, x + 20.0, 30.0).unwrap().to_polygon());
    PredictionSet {
        images: vec![ImageAnnotation {
            image_id: "page".into(),
            width: 256,
            height: 64,
            units: vec![unit("a", 10.0), unit("b", 100.0)],
            blocks: vec![],
        }],
    }
}

/// Weights under which, for the detections of [`two_detections`] and `seed`,
/// `a` predicts the index assigned to `b` and `b` predicts its own index.
///
/// Attention and visual projections are zero, so tokens pass through
/// unchanged. The head scores class `c` by `10 * <ie_token, ie(c)>`, which
/// peaks at the token's own index (value `10 * d / 2 = 20`). The spatial
/// MLP's first channel is `relu(50 - x1)`, i.e. 40 for `a` and 0 for `b`; it
/// feeds class `index(b)` with weight 2, lifting it to at least 60 for `a`.
pub fn crafted_archive(seed: u64) -> TensorArchive {
    let cfg = SMALL;
    let d = cfg.d;
    let classes = cfg.n_index + 1;
    let mut a = zero_model_archive(&cfg, 1);
    a.get_mut("se.W1").unwrap().values_mut()[2 * d] = -1.0;
    a.get_mut("se.b1").unwrap().values_mut()[0] = 50.0;
    a.get_mut("se.W2").unwrap().values_mut()[0] = 1.0;
    let idx_b = assign_indices(2, cfg.n_index, seed).unwrap()[1];
    let head = a.get_mut("iph.W").unwrap().values_mut();
    for c in 0..cfg.n_index {
        for (k, v) in indexing_embedding(c, d).into_iter().enumerate() {
            head[(d + k) * classes + c] = (10.0 * v) as f32;
        }
    }
    head[2 * d * classes + idx_b] = 2.0;
    a
}
