//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls into the code path it checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use ctbkit::dataset::{ContextualBlock, Dataset, Granularity, Id, ImageAnnotation, IntegralUnit, PredictionSet};
use ctbkit::geometry::{Polygon, Rect};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- geometry

pub fn shoelace(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    s / 2.0
}

fn ccw(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if shoelace(&pts) < 0.0 {
        pts.reverse();
    }
    pts
}

/// Sutherland–Hodgman clip of convex `subject` by convex `clip`.
pub fn convex_clip(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let clip = ccw(clip.to_vec());
    let mut out = ccw(subject.to_vec());
    for i in 0..clip.len() {
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let inside = |p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0;
        let cross = |p: (f64, f64), q: (f64, f64)| {
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let t = (ex * (a.1 - p.1) - ey * (a.0 - p.0)) / (ex * dy - ey * dx);
            (p.0 + t * dx, p.1 + t * dy)
        };
        let input = std::mem::take(&mut out);
        if input.is_empty() {
            break;
        }
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(cross(prev, cur)),
                (false, true) => {
                    out.push(cross(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    out
}

pub fn convex_iou(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let inter = convex_clip(a, b);
    let ia = if inter.len() >= 3 { shoelace(&inter).abs() } else { 0.0 };
    let union = shoelace(a).abs() + shoelace(b).abs() - ia;
    ia / union
}

/// Convex polygon: `k` sorted random angles on a rotated ellipse.
pub fn random_convex(rng: &mut ChaCha8Rng, cx: f64, cy: f64) -> Vec<(f64, f64)> {
    let k = rng.random_range(3..=10);
    let (rx, ry) = (rng.random_range(5.0..60.0), rng.random_range(5.0..60.0));
    let rot: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let mut angles: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    while angles.len() < 3 {
        angles = vec![0.0, 2.1, 4.2];
    }
    angles
        .iter()
        .map(|t| {
            let (x, y) = (rx * t.cos(), ry * t.sin());
            (cx + x * rot.cos() - y * rot.sin(), cy + x * rot.sin() + y * rot.cos())
        })
        .collect()
}

pub fn rect_iou(a: &Rect, b: &Rect) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let i = iw * ih;
    i / ((a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - i)
}

/// Greedy matching by repeated selection of the best remaining pair.
pub fn greedy_oracle(ious: &[Vec<f64>], threshold: f64) -> Vec<(usize, usize)> {
    let (nd, ng) = (ious.len(), ious.first().map_or(0, Vec::len));
    let mut used_d = vec![false; nd];
    let mut used_g = vec![false; ng];
    let mut pairs = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for g in 0..ng {
            for d in 0..nd {
                if used_d[d] || used_g[g] || ious[d][g] < threshold {
                    continue;
                }
                // strict > keeps the earliest (lowest gt, then det) among ties
                if best.is_none_or(|(v, _, _)| ious[d][g] > v) {
                    best = Some((ious[d][g], d, g));
                }
            }
        }
        let Some((_, d, g)) = best else { break };
        used_d[d] = true;
        used_g[g] = true;
        pairs.push((d, g));
    }
    pairs.sort();
    pairs
}

/// Largest number of disjoint pairs with IoU at or above the threshold, by
/// augmenting paths.
pub fn max_matching_size(ious: &[Vec<f64>], threshold: f64) -> usize {
    fn augment(d: usize, ious: &[Vec<f64>], t: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for g in 0..owner.len() {
            if ious[d][g] >= t && !seen[g] {
                seen[g] = true;
                if owner[g].is_none_or(|o| augment(o, ious, t, seen, owner)) {
                    owner[g] = Some(d);
                    return true;
                }
            }
        }
        false
    }
    let ng = ious.first().map_or(0, Vec::len);
    let mut owner = vec![None; ng];
    (0..ious.len()).filter(|&d| augment(d, ious, threshold, &mut vec![false; ng], &mut owner)).count()
}

// ---------------------------------------------------------------- dense math

pub type Mat = Vec<Vec<f64>>;

pub fn to_mat(a: &ctbkit::ndarray::Array2<f64>) -> Mat {
    a.outer_iter().map(|r| r.to_vec()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for t in 0..k {
                s += a[i][t] * b[t][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn add_bias(a: &Mat, b: &[f64]) -> Mat {
    a.iter().map(|r| r.iter().zip(b).map(|(x, y)| x + y).collect()).collect()
}

pub fn layer_norm(a: &Mat, g: &[f64], b: &[f64]) -> Mat {
    a.iter()
        .map(|r| {
            let n = r.len() as f64;
            let mean = r.iter().sum::<f64>() / n;
            let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            r.iter().enumerate().map(|(j, x)| (x - mean) / (var + 1e-5).sqrt() * g[j] + b[j]).collect()
        })
        .collect()
}

pub fn softmax(row: &[f64]) -> Vec<f64> {
    let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = row.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

pub fn kahan_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Bilinear value at continuous cell coordinates as a tent-weighted sum over
/// every cell, after clamping to the map.
pub fn tent_sample(map: &[Vec<f64>], y: f64, x: f64) -> f64 {
    let h = map.len();
    let w = map[0].len();
    let y = y.max(0.0).min((h - 1) as f64);
    let x = x.max(0.0).min((w - 1) as f64);
    let mut s = 0.0;
    for (i, row) in map.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let wy = (1.0 - (y - i as f64).abs()).max(0.0);
            let wx = (1.0 - (x - j as f64).abs()).max(0.0);
            s += wy * wx * v;
        }
    }
    s
}

/// Pools one channel into `grid x grid` bins, four samples per bin at the
/// quarter points, pixel `p` at cell coordinate `p / stride - 0.5`.
pub fn roi_oracle(map: &[Vec<f64>], stride: f64, r: &Rect, grid: usize) -> Vec<Vec<f64>> {
    let bw = (r.x2 - r.x1) / stride / grid as f64;
    let bh = (r.y2 - r.y1) / stride / grid as f64;
    let mut out = vec![vec![0.0; grid]; grid];
    for (by, row) in out.iter_mut().enumerate() {
        for (bx, cell) in row.iter_mut().enumerate() {
            let mut vals = Vec::new();
            for fy in [0.25, 0.75] {
                for fx in [0.25, 0.75] {
                    let y = r.y1 / stride - 0.5 + (by as f64 + fy) * bh;
                    let x = r.x1 / stride - 0.5 + (bx as f64 + fx) * bw;
                    vals.push(tent_sample(map, y, x));
                }
            }
            *cell = vals.iter().sum::<f64>() / 4.0;
        }
    }
    out
}

// ---------------------------------------------------------------- graphs

/// Component label (smallest member) by undirected BFS over non-self edges.
pub fn reachability_labels(n: usize, vertices: &[usize], edges: &[(usize, usize)]) -> HashMap<usize, usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut label = HashMap::new();
    for &v in vertices {
        if label.contains_key(&v) {
            continue;
        }
        let mut seen = vec![v];
        let mut stack = vec![v];
        let mut visited = vec![false; n];
        visited[v] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    seen.push(y);
                    stack.push(y);
                }
            }
        }
        let min = *seen.iter().min().unwrap();
        for s in seen {
            label.insert(s, min);
        }
    }
    label
}

// ---------------------------------------------------------------- metrics

/// Rectangle of unit `id` in an image, the oracle works on boxes only.
pub fn unit_rect(img: &ImageAnnotation, id: &Id) -> Rect {
    img.units.iter().find(|u| &u.unit_id == id).unwrap().polygon.bounds()
}

/// Greedy matching of predicted to ground-truth unit ids, both sides ordered
/// by id.
pub fn oracle_matching(gt: &ImageAnnotation, pred: Option<&ImageAnnotation>, t: f64) -> BTreeMap<Id, Id> {
    let Some(pred) = pred else { return BTreeMap::new() };
    let mut gids: Vec<&Id> = gt.units.iter().map(|u| &u.unit_id).collect();
    gids.sort();
    let mut dids: Vec<&Id> = pred.units.iter().map(|u| &u.unit_id).collect();
    dids.sort();
    let ious: Vec<Vec<f64>> = dids
        .iter()
        .map(|d| gids.iter().map(|g| rect_iou(&unit_rect(pred, d), &unit_rect(gt, g))).collect())
        .collect();
    greedy_oracle(&ious, t).into_iter().map(|(d, g)| (dids[d].clone(), gids[g].clone())).collect()
}

/// LA by enumerating every ordered pair of ground-truth units and every
/// ordered pair of detections.
pub fn la_oracle(gt: &ImageAnnotation, pred: Option<&ImageAnnotation>, m: &BTreeMap<Id, Id>) -> (u64, u64) {
    let follows = |blocks: &[ContextualBlock], a: &Id, b: &Id| {
        blocks.iter().any(|blk| (0..blk.units.len().saturating_sub(1)).any(|k| &blk.units[k] == a && &blk.units[k + 1] == b))
    };
    let (mut tp, mut n) = (0, 0);
    for a in &gt.units {
        for b in &gt.units {
            if !follows(&gt.blocks, &a.unit_id, &b.unit_id) {
                continue;
            }
            n += 1;
            let Some(pred) = pred else { continue };
            for da in &pred.units {
                for db in &pred.units {
                    if m.get(&da.unit_id) == Some(&a.unit_id)
                        && m.get(&db.unit_id) == Some(&b.unit_id)
                        && follows(&pred.blocks, &da.unit_id, &db.unit_id)
                    {
                        tp += 1;
                    }
                }
            }
        }
    }
    (tp, n)
}

/// GA by comparing every ground-truth block with every predicted block.
pub fn ga_oracle(gt: &ImageAnnotation, pred: Option<&ImageAnnotation>, m: &BTreeMap<Id, Id>) -> (u64, u64) {
    let mut tp = 0;
    for g in &gt.blocks {
        let hit = pred.is_some_and(|p| {
            p.blocks.iter().any(|pb| {
                pb.units.len() == g.units.len() && pb.units.iter().zip(&g.units).all(|(d, gid)| m.get(d) == Some(gid))
            })
        });
        if hit {
            tp += 1;
        }
    }
    (tp, gt.blocks.len() as u64)
}

/// Naive n-gram counter: lists every n-gram as a vector of strings and counts
/// matches by scanning, removing used references.
pub fn lc_oracle(gt: &ImageAnnotation, pred: Option<&ImageAnnotation>, m: &BTreeMap<Id, Id>) -> ([u64; 5], [u64; 5]) {
    let mut matches = [0u64; 5];
    let mut cands = [0u64; 5];
    let pred_seqs: Vec<Vec<String>> = pred.map_or_else(Vec::new, |p| {
        p.blocks
            .iter()
            .map(|b| b.units.iter().map(|d| m.get(d).map_or(format!("#unmatched:{d}"), |g| format!("gt:{g}"))).collect())
            .collect()
    });
    let gt_seqs: Vec<Vec<String>> = gt.blocks.iter().map(|b| b.units.iter().map(|g| format!("gt:{g}")).collect()).collect();
    for n in 1..=5 {
        let grams = |seqs: &[Vec<String>]| -> Vec<Vec<String>> {
            let mut out = Vec::new();
            for s in seqs {
                if n == 1 {
                    if s.len() == 1 {
                        out.push(s.clone());
                    }
                } else if s.len() >= n {
                    for k in 0..=(s.len() - n) {
                        out.push(s[k..k + n].to_vec());
                    }
                }
            }
            out
        };
        let c = grams(&pred_seqs);
        let mut r = grams(&gt_seqs);
        cands[n - 1] = c.len() as u64;
        for g in &c {
            if let Some(pos) = r.iter().position(|x| x == g) {
                r.remove(pos);
                matches[n - 1] += 1;
            }
        }
    }
    (matches, cands)
}

// ---------------------------------------------------------------- fixtures

pub fn rect_poly(x: f64, y: f64, w: f64, h: f64) -> Polygon {
    Rect::new(x, y, x + w, y + h).unwrap().to_polygon()
}

/// Ground truth with up to `max_units` boxes on a coarse grid, split into
/// blocks with random order. At least one block has two or more units when
/// `min_pair` is set.
pub fn random_gt_image(rng: &mut ChaCha8Rng, image_id: &str, max_units: usize, min_pair: bool) -> ImageAnnotation {
    let lo = if min_pair { 2 } else { 1 };
    let n = rng.random_range(lo..=max_units);
    let mut cells: Vec<(usize, usize)> = (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).collect();
    cells.shuffle(rng);
    let units: Vec<IntegralUnit> = (0..n)
        .map(|k| {
            let (r, c) = cells[k];
            let mut u = IntegralUnit::new(format!("g{k}").as_str(), rect_poly(c as f64 * 50.0 + 5.0, r as f64 * 40.0 + 5.0, 30.0, 20.0));
            u.text = Some(format!("t{k}"));
            u
        })
        .collect();
    let mut ids: Vec<Id> = units.iter().map(|u| u.unit_id.clone()).collect();
    ids.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = &ids[..];
    while !rest.is_empty() {
        let take = if min_pair && blocks.is_empty() { rng.random_range(2..=rest.len()) } else { rng.random_range(1..=rest.len()) };
        blocks.push(ContextualBlock { block_id: Id(format!("b{}", blocks.len())), units: rest[..take].to_vec() });
        rest = &rest[take..];
    }
    ImageAnnotation { image_id: image_id.into(), width: 220, height: 180, units, blocks }
}

/// Predictions for a ground-truth image: each unit detected with probability
/// 0.8 under random jitter, plus up to two false alarms, grouped randomly.
pub fn random_prediction(rng: &mut ChaCha8Rng, gt: &ImageAnnotation) -> ImageAnnotation {
    let mut units = Vec::new();
    for (k, u) in gt.units.iter().enumerate() {
        if rng.random_bool(0.8) {
            let b = u.polygon.bounds();
            let j = |rng: &mut ChaCha8Rng| rng.random_range(-6.0..6.0f64).round();
            let (x1, y1) = ((b.x1 + j(rng)).max(0.0), (b.y1 + j(rng)).max(0.0));
            let (x2, y2) = ((b.x2 + j(rng)).max(x1 + 2.0), (b.y2 + j(rng)).max(y1 + 2.0));
            units.push(IntegralUnit::new(format!("d{k}").as_str(), Rect::new(x1, y1, x2, y2).unwrap().to_polygon()));
        }
    }
    for f in 0..rng.random_range(0..=2) {
        let (x, y) = (rng.random_range(0.0..180.0f64).round(), rng.random_range(0.0..150.0f64).round());
        units.push(IntegralUnit::new(format!("f{f}").as_str(), rect_poly(x, y, 30.0, 20.0)));
    }
    let mut ids: Vec<Id> = units.iter().map(|u| u.unit_id.clone()).collect();
    ids.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = &ids[..];
    while !rest.is_empty() {
        let take = rng.random_range(1..=rest.len());
        blocks.push(ContextualBlock { block_id: Id(format!("p{}", blocks.len())), units: rest[..take].to_vec() });
        rest = &rest[take..];
    }
    units.shuffle(rng);
    ImageAnnotation { image_id: gt.image_id.clone(), width: gt.width, height: gt.height, units, blocks }
}

pub fn dataset(images: Vec<ImageAnnotation>) -> Dataset {
    Dataset { granularity: Granularity::Word, images }
}

pub fn predictions(images: Vec<ImageAnnotation>) -> PredictionSet {
    PredictionSet { images }
}

/// A page with three compact blocks of 20 x 20 characters, far apart,
/// annotated in reading order: a 2 x 2 square, a row of three and a column of
/// three. Every block spans less than the baseline bandwidth (1.5 x 28.3).
pub fn three_block_page(image_id: &str) -> ImageAnnotation {
    let layouts = [
        (40.0, 40.0, vec![(0.0, 0.0), (22.0, 0.0), (0.0, 22.0), (22.0, 22.0)]),
        (600.0, 40.0, vec![(0.0, 0.0), (20.5, 0.0), (41.0, 0.0)]),
        (40.0, 600.0, vec![(0.0, 0.0), (0.0, 20.5), (0.0, 41.0)]),
    ];
    let mut units = Vec::new();
    let mut blocks = Vec::new();
    for (b, (ox, oy, offsets)) in layouts.into_iter().enumerate() {
        let mut ids = Vec::new();
        for (k, (dx, dy)) in offsets.into_iter().enumerate() {
            let id = Id(format!("u{b}{k}"));
            let poly = rect_poly(ox + dx, oy + dy, 20.0, 20.0);
            units.push(IntegralUnit { unit_id: id.clone(), polygon: poly, text: Some("c".into()), score: None });
            ids.push(id);
        }
        blocks.push(ContextualBlock { block_id: Id(format!("b{b}")), units: ids });
    }
    ImageAnnotation { image_id: image_id.into(), width: 1000, height: 1000, units, blocks }
}
