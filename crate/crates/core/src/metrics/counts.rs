//! Per-image counting for the three block metrics.

use std::collections::{HashMap, HashSet};

use crate::dataset::ImageAnnotation;
use crate::geometry::Matching;

/// Largest n-gram order scored by local continuity.
pub const MAX_NGRAM: usize = 5;

/// True positives over a ground-truth total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Ratio {
    pub tp: u64,
    pub n: u64,
}

impl Ratio {
    /// `tp / n`, or 0 when `n` is 0.
    pub fn value(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.tp as f64 / self.n as f64
        }
    }

    pub fn is_undefined(&self) -> bool {
        self.n == 0
    }
}

impl std::ops::AddAssign for Ratio {
    fn add_assign(&mut self, o: Ratio) {
        self.tp += o.tp;
        self.n += o.n;
    }
}

/// Clipped matches and candidate counts, index `n - 1` for each n-gram order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NgramCounts {
    pub matches: [u64; MAX_NGRAM],
    pub candidates: [u64; MAX_NGRAM],
}

impl NgramCounts {
    pub fn precision(&self, n: usize) -> Option<f64> {
        let c = self.candidates[n - 1];
        (c > 0).then(|| self.matches[n - 1] as f64 / c as f64)
    }

    /// Arithmetic mean of the precisions of every order that had candidates;
    /// 0 when none did.
    pub fn value(&self) -> f64 {
        let ps: Vec<f64> = (1..=MAX_NGRAM).filter_map(|n| self.precision(n)).collect();
        if ps.is_empty() {
            0.0
        } else {
            ps.iter().sum::<f64>() / ps.len() as f64
        }
    }

    pub fn is_undefined(&self) -> bool {
        self.candidates.iter().all(|&c| c == 0)
    }
}

impl std::ops::AddAssign for NgramCounts {
    fn add_assign(&mut self, o: NgramCounts) {
        for k in 0..MAX_NGRAM {
            self.matches[k] += o.matches[k];
            self.candidates[k] += o.candidates[k];
        }
    }
}

/// One image's ground-truth and predicted blocks as positions into their unit
/// lists, with the detection-to-ground-truth assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedImage {
    pub gt_blocks: Vec<Vec<usize>>,
    pub pred_blocks: Vec<Vec<usize>>,
    pub pred_to_gt: Vec<Option<usize>>,
}

impl AlignedImage {
    /// `matching` ids are positions in `gt.units` and `pred.units`.
    pub fn new(gt: &ImageAnnotation, pred: Option<&ImageAnnotation>, matching: &Matching) -> Self {
        let n_pred = pred.map_or(0, |p| p.units.len());
        AlignedImage {
            gt_blocks: gt.block_positions(),
            pred_blocks: pred.map_or_else(Vec::new, |p| p.block_positions()),
            pred_to_gt: matching.gt_for_detection(n_pred),
        }
    }

    fn gt_to_pred(&self) -> HashMap<usize, usize> {
        self.pred_to_gt.iter().enumerate().filter_map(|(d, g)| g.map(|g| (g, d))).collect()
    }
}

/// Ground-truth adjacent pairs whose matched detections are also adjacent, in
/// the same order, inside one predicted block.
pub fn local_accuracy(img: &AlignedImage) -> Ratio {
    let mut pred_next = HashMap::new();
    for block in &img.pred_blocks {
        for w in block.windows(2) {
            pred_next.insert(w[0], w[1]);
        }
    }
    let gt_to_pred = img.gt_to_pred();
    let mut r = Ratio::default();
    for block in &img.gt_blocks {
        for w in block.windows(2) {
            r.n += 1;
            if let (Some(da), Some(db)) = (gt_to_pred.get(&w[0]), gt_to_pred.get(&w[1])) {
                if pred_next.get(da) == Some(db) {
                    r.tp += 1;
                }
            }
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Token {
    Gt(usize),
    Unmatched(usize),
}

/// BLEU-style clipped n-gram counts over predicted unit sequences, with
/// unmatched detections as tokens that match nothing. Order 1 only looks at
/// single-unit blocks on both sides.
pub fn local_continuity(img: &AlignedImage) -> NgramCounts {
    let pred_seqs: Vec<Vec<Token>> = img
        .pred_blocks
        .iter()
        .map(|b| b.iter().map(|&d| img.pred_to_gt[d].map_or(Token::Unmatched(d), Token::Gt)).collect())
        .collect();
    let gt_seqs: Vec<Vec<Token>> = img.gt_blocks.iter().map(|b| b.iter().map(|&g| Token::Gt(g)).collect()).collect();

    let mut out = NgramCounts::default();
    for n in 1..=MAX_NGRAM {
        let cand = ngram_counts(&pred_seqs, n);
        let refs = ngram_counts(&gt_seqs, n);
        out.candidates[n - 1] = cand.values().sum();
        out.matches[n - 1] = cand.iter().map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0))).sum();
    }
    out
}

fn ngram_counts(seqs: &[Vec<Token>], n: usize) -> HashMap<&[Token], u64> {
    let mut counts = HashMap::new();
    for s in seqs {
        if n == 1 {
            if s.len() == 1 {
                *counts.entry(&s[..]).or_insert(0) += 1;
            }
            continue;
        }
        for w in s.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Ground-truth blocks reproduced exactly by a predicted block: every unit
/// matched, same order, nothing extra.
pub fn global_accuracy(img: &AlignedImage) -> Ratio {
    let predicted: HashSet<Vec<usize>> = img
        .pred_blocks
        .iter()
        .filter_map(|b| b.iter().map(|&d| img.pred_to_gt[d]).collect::<Option<Vec<_>>>())
        .collect();
    Ratio {
        tp: img.gt_blocks.iter().filter(|b| predicted.contains(*b)).count() as u64,
        n: img.gt_blocks.len() as u64,
    }
}
