use super::{Polygon, Rect};

/// Cell count along the longer side of the union bounding box when polygons
/// are rasterized.
pub const RASTER_CELLS: usize = 1024;

/// IoU value plus a flag raised when either input had zero area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub iou: f64,
    pub degenerate: bool,
}

pub fn iou(a: &Polygon, b: &Polygon) -> f64 {
    overlap(a, b).iou
}

/// Intersection over union of two polygons.
///
/// Two axis-aligned rectangles take an exact analytic path. Anything else is
/// rasterized with the even-odd rule on a grid anchored to the union bounding
/// box, sampling cell centers, so the result does not depend on argument
/// order.
pub fn overlap(a: &Polygon, b: &Polygon) -> Overlap {
    let (ba, bb) = (a.bounds(), b.bounds());
    if is_degenerate(a, &ba) || is_degenerate(b, &bb) {
        return Overlap { iou: 0.0, degenerate: true };
    }
    let iou = match (a.as_axis_rect(), b.as_axis_rect()) {
        (Some(ra), Some(rb)) => rect_iou(&ra, &rb),
        _ if !ba.intersects(&bb) => 0.0,
        _ => raster_iou(a, b, &ba.union(&bb)),
    };
    Overlap { iou, degenerate: false }
}

fn is_degenerate(poly: &Polygon, bounds: &Rect) -> bool {
    bounds.width() <= 0.0 || bounds.height() <= 0.0 || poly.signed_area() == 0.0
}

fn rect_iou(a: &Rect, b: &Rect) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

fn raster_iou(a: &Polygon, b: &Polygon, frame: &Rect) -> f64 {
    let long = frame.width().max(frame.height());
    let scale = RASTER_CELLS as f64 / long;
    let cols = ((frame.width() * scale).ceil() as i64).max(1);
    let rows = ((frame.height() * scale).ceil() as i64).max(1);

    let (mut count_a, mut count_b, mut count_both) = (0i64, 0i64, 0i64);
    let mut xs = Vec::new();
    let mut spans_a = Vec::new();
    let mut spans_b = Vec::new();
    for row in 0..rows {
        let y = frame.y1 + (row as f64 + 0.5) / scale;
        row_spans(a, y, frame.x1, scale, cols, &mut xs, &mut spans_a);
        row_spans(b, y, frame.x1, scale, cols, &mut xs, &mut spans_b);
        count_a += spans_a.iter().map(|(s, e)| e - s).sum::<i64>();
        count_b += spans_b.iter().map(|(s, e)| e - s).sum::<i64>();
        count_both += span_overlap(&spans_a, &spans_b);
    }
    let union = count_a + count_b - count_both;
    if union == 0 {
        0.0
    } else {
        count_both as f64 / union as f64
    }
}

/// Column ranges `[start, end)` whose cell centers lie inside `poly` on the
/// scanline `y`, by the even-odd rule.
fn row_spans(poly: &Polygon, y: f64, x0: f64, scale: f64, cols: i64, xs: &mut Vec<f64>, out: &mut Vec<(i64, i64)>) {
    xs.clear();
    out.clear();
    for (p, q) in poly.edges() {
        if (p.y <= y && y < q.y) || (q.y <= y && y < p.y) {
            xs.push(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
        }
    }
    xs.sort_by(f64::total_cmp);
    for pair in xs.chunks_exact(2) {
        // cell j is inside when x_in <= x0 + (j + 0.5) / scale < x_out
        let start = ((pair[0] - x0) * scale - 0.5).ceil() as i64;
        let end = ((pair[1] - x0) * scale - 0.5).ceil() as i64;
        let (start, end) = (start.clamp(0, cols), end.clamp(0, cols));
        if end <= start {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1 >= start => last.1 = last.1.max(end),
            _ => out.push((start, end)),
        }
    }
}

fn span_overlap(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    let (mut i, mut j, mut total) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}
