use crate::geometry::{Point, Rect};

use super::BaselineConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanShiftResult {
    /// Unit positions per group, each ascending; groups ordered by first member.
    pub groups: Vec<Vec<usize>>,
    /// Converged mode of every unit's trajectory.
    pub modes: Vec<Point>,
    pub bandwidth: f64,
    /// False when some trajectory hit `max_iterations`; the last iterate is used.
    pub converged: bool,
}

/// Median of the box diagonals.
pub fn median_diagonal(units: &[Rect]) -> f64 {
    let mut d: Vec<f64> = units.iter().map(Rect::diagonal).collect();
    d.sort_by(f64::total_cmp);
    let n = d.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => d[n / 2],
        _ => (d[n / 2 - 1] + d[n / 2]) / 2.0,
    }
}

/// Flat-kernel mean shift over box centers.
///
/// Each center climbs to the mean of all centers within the bandwidth until it
/// moves less than the convergence tolerance. Modes closer than half a
/// bandwidth share a group, scanning units in order.
pub fn mean_shift_group(units: &[Rect], cfg: &BaselineConfig) -> MeanShiftResult {
    let centers: Vec<Point> = units.iter().map(Rect::center).collect();
    let bandwidth = cfg.bandwidth_factor * median_diagonal(units);
    let extent = units.iter().skip(1).fold(units.first().copied(), |acc, r| acc.map(|a| a.union(r)));
    let scale = extent.map_or(0.0, |e| e.diagonal());
    let eps = cfg.convergence_eps * if scale > 0.0 { scale } else { 1.0 };

    let mut converged = true;
    let modes: Vec<Point> = centers
        .iter()
        .map(|&start| {
            let mut pos = start;
            for _ in 0..cfg.max_iterations {
                let Some(next) = window_mean(&centers, pos, bandwidth) else {
                    return pos;
                };
                let shift = (next.x - pos.x).hypot(next.y - pos.y);
                pos = next;
                if shift < eps {
                    return pos;
                }
            }
            converged = false;
            pos
        })
        .collect();

    let mut reps: Vec<Point> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        match reps.iter().position(|r| (r.x - m.x).hypot(r.y - m.y) <= bandwidth / 2.0) {
            Some(g) => groups[g].push(i),
            None => {
                reps.push(*m);
                groups.push(vec![i]);
            }
        }
    }
    MeanShiftResult { groups, modes, bandwidth, converged }
}

fn window_mean(points: &[Point], at: Point, bandwidth: f64) -> Option<Point> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for p in points {
        if (p.x - at.x).hypot(p.y - at.y) <= bandwidth {
            sx += p.x;
            sy += p.y;
            n += 1;
        }
    }
    (n > 0).then(|| Point::new(sx / n as f64, sy / n as f64))
}
