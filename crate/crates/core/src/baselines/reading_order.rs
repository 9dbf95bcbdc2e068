use crate::generator::DisjointSet;
use crate::geometry::Rect;

/// Orders boxes left-to-right, top-to-down.
///
/// Boxes whose vertical extents overlap by at least `line_overlap` of the
/// shorter height are joined into lines (transitively). Lines go top to
/// bottom by mean center y, boxes within a line by `x1`; ties fall back to
/// input position.
pub fn reading_order_sort(units: &[Rect], line_overlap: f64) -> Vec<usize> {
    let n = units.len();
    let mut lines = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&units[i], &units[j]);
            let overlap = a.y2.min(b.y2) - a.y1.max(b.y1);
            if overlap >= 0.0 && overlap >= line_overlap * a.height().min(b.height()) {
                lines.union(i, j);
            }
        }
    }
    let labels = lines.labels();

    let mut sum_y = vec![0.0; n];
    let mut count = vec![0usize; n];
    for (i, &l) in labels.iter().enumerate() {
        sum_y[l] += units[i].center().y;
        count[l] += 1;
    }
    let line_y = |i: usize| sum_y[labels[i]] / count[labels[i]] as f64;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        line_y(a)
            .total_cmp(&line_y(b))
            .then(labels[a].cmp(&labels[b]))
            .then(units[a].x1.total_cmp(&units[b].x1))
            .then(a.cmp(&b))
    });
    order
}
