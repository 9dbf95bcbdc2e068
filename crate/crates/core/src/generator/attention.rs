use ndarray::{s, Array2, ArrayView2};

use super::{AttentionBlock, GeneratorError, GeneratorWeights};
use crate::nn::softmax_rows;

/// Attention probabilities of one forward pass, `[layer][head]`, each `r x r`.
pub type AttentionTrace = Vec<Vec<Array2<f64>>>;

/// Runs the attention stack over the token rows.
pub fn attention_forward(tokens: ArrayView2<f64>, w: &GeneratorWeights) -> Result<Array2<f64>, GeneratorError> {
    forward(tokens, w, None)
}

/// As [`attention_forward`], also returning every attention matrix.
pub fn attention_forward_traced(tokens: ArrayView2<f64>, w: &GeneratorWeights) -> Result<(Array2<f64>, AttentionTrace), GeneratorError> {
    let mut trace = Vec::with_capacity(w.blocks.len());
    let out = forward(tokens, w, Some(&mut trace))?;
    Ok((out, trace))
}

fn forward(tokens: ArrayView2<f64>, w: &GeneratorWeights, mut trace: Option<&mut AttentionTrace>) -> Result<Array2<f64>, GeneratorError> {
    if tokens.ncols() != w.dim() {
        return Err(GeneratorError::Shape(format!("tokens are {} wide, weights expect {}", tokens.ncols(), w.dim())));
    }
    let mut x = tokens.to_owned();
    for block in &w.blocks {
        let (attended, probs) = self_attention(&block.ln1.apply_rows(x.view()), block, w.heads);
        x += &attended;
        let ff = block.linear.apply_rows(block.ln2.apply_rows(x.view()).view());
        x += &ff;
        if let Some(t) = trace.as_deref_mut() {
            t.push(probs);
        }
    }
    Ok(x)
}

fn self_attention(x: &Array2<f64>, block: &AttentionBlock, heads: usize) -> (Array2<f64>, Vec<Array2<f64>>) {
    let q = block.query.apply_rows(x.view());
    let k = block.key.apply_rows(x.view());
    let v = block.value.apply_rows(x.view());
    let head_dim = x.ncols() / heads;
    let scale = 1.0 / (head_dim as f64).sqrt();

    let mut concat = Array2::zeros(x.dim());
    let mut probs = Vec::with_capacity(heads);
    for h in 0..heads {
        let cols = s![.., h * head_dim..(h + 1) * head_dim];
        let mut scores = q.slice(cols).dot(&k.slice(cols).t()) * scale;
        softmax_rows(&mut scores);
        concat.slice_mut(cols).assign(&scores.dot(&v.slice(cols)));
        probs.push(scores);
    }
    (block.output.apply_rows(concat.view()), probs)
}
