//! Dense building blocks shared by the embedding extractor and the generator.
//! Row-vector convention throughout: `y = x W + b` with `W` shaped `in x out`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::embeddings::{ArchiveError, TensorArchive};

#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Affine {
    pub fn new(w: Array2<f64>, b: Array1<f64>) -> Result<Self, ArchiveError> {
        if w.ncols() != b.len() {
            return Err(ArchiveError::Shape { name: "bias".into(), expected: vec![w.ncols()], found: vec![b.len()] });
        }
        Ok(Affine { w, b })
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        Affine { w: Array2::zeros((input, output)), b: Array1::zeros(output) }
    }

    /// Loads `{w_name}` (`input x output`) and `{b_name}` (`output`).
    pub fn from_archive(a: &TensorArchive, w_name: &str, b_name: &str, input: usize, output: usize) -> Result<Self, ArchiveError> {
        Ok(Affine { w: a.matrix(w_name, input, output)?, b: a.vector(b_name, output)? })
    }

    pub fn input_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        x.dot(&self.w) + &self.b
    }

    pub fn apply_rows(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.w) + &self.b
    }
}

/// Per-row layer normalization with learned gain and shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gain: Array1<f64>,
    pub shift: Array1<f64>,
}

pub const LAYER_NORM_EPS: f64 = 1e-5;

impl LayerNorm {
    pub fn identity(dim: usize) -> Self {
        LayerNorm { gain: Array1::ones(dim), shift: Array1::zeros(dim) }
    }

    pub fn apply_rows(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        let dim = x.ncols() as f64;
        for mut row in out.axis_iter_mut(Axis(0)) {
            let mean = row.sum() / dim;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / dim;
            let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
            row.iter_mut()
                .zip(self.gain.iter().zip(self.shift.iter()))
                .for_each(|(v, (g, s))| *v = (*v - mean) * inv * g + s);
        }
        out
    }
}

pub fn relu(mut x: Array1<f64>) -> Array1<f64> {
    x.mapv_inplace(|v| v.max(0.0));
    x
}

/// Softmax of each row, max-subtracted.
pub fn softmax_rows(x: &mut Array2<f64>) {
    for mut row in x.axis_iter_mut(Axis(0)) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}
