//! Points, polygons and rectangles, polygon IoU, and one-to-one matching of
//! detections against ground truth.

mod iou;
mod matching;

pub use iou::{iou, overlap, Overlap, RASTER_CELLS};
pub use matching::{greedy_match, match_detections, pairwise_ious, IouCandidate, MatchPair, Matching};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {index} is not finite")]
    NonFinite { index: usize },
    #[error("rectangle corners out of order: ({x1}, {y1}) .. ({x2}, {y2})")]
    InvertedRect { x1: f64, y1: f64, x2: f64, y2: f64 },
    #[error("matching threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned rectangle, `(x1, y1)` top-left and `(x2, y2)` bottom-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Rect {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, GeometryError> {
        if !(x1 <= x2 && y1 <= y2) {
            return Err(GeometryError::InvertedRect { x1, y1, x2, y2 });
        }
        Ok(Rect { x1, y1, x2, y2 })
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
            x2: self.x2.max(other.x2),
            y2: self.y2.max(other.y2),
        }
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x1 < other.x2 && other.x1 < self.x2 && self.y1 < other.y2 && other.y1 < self.y2
    }

    /// The rectangle as a clockwise (in image coordinates) 4-vertex polygon.
    pub fn to_polygon(&self) -> Polygon {
        Polygon {
            vertices: vec![
                Point::new(self.x1, self.y1),
                Point::new(self.x2, self.y1),
                Point::new(self.x2, self.y2),
                Point::new(self.x1, self.y2),
            ],
        }
    }
}

/// A closed ring of `k >= 3` vertices. Simplicity and positive area are not
/// enforced at construction; [`Polygon::is_simple`] and [`Polygon::area`]
/// let validators report them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(index) = vertices.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(GeometryError::NonFinite { index });
        }
        Ok(Polygon { vertices })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace signed area; positive for counter-clockwise rings in a y-up frame.
    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(p, q)| p.x * q.y - q.x * p.y).sum::<f64>() / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn bounds(&self) -> Rect {
        polygon_bounds(self)
    }

    /// Returns the rectangle when the ring is exactly an axis-aligned rectangle
    /// (four corners, consecutive vertices sharing one coordinate).
    pub fn as_axis_rect(&self) -> Option<Rect> {
        if self.vertices.len() != 4 {
            return None;
        }
        let r = self.bounds();
        if r.width() <= 0.0 || r.height() <= 0.0 {
            return None;
        }
        let on_corner = |p: &Point| (p.x == r.x1 || p.x == r.x2) && (p.y == r.y1 || p.y == r.y2);
        if !self.vertices.iter().all(on_corner) {
            return None;
        }
        let axis_edges = self.edges().all(|(p, q)| (p.x == q.x) != (p.y == q.y));
        axis_edges.then_some(r)
    }

    /// True when no two non-adjacent edges touch and no edge has zero length.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<(Point, Point)> = self.edges().collect();
        if edges.iter().any(|(p, q)| p == q) {
            return false;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if adjacent {
                    // Adjacent edges may only share their common vertex; they
                    // overlap when collinear and folding back on each other.
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(shared, p, q) == 0.0 && dot(p, shared, q) > 0.0 {
                        return false;
                    }
                    continue;
                }
                if segments_touch(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect(),
        }
    }
}

impl TryFrom<Vec<[f64; 2]>> for Polygon {
    type Error = GeometryError;

    fn try_from(coords: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Polygon::new(coords.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}

impl From<Polygon> for Vec<[f64; 2]> {
    fn from(poly: Polygon) -> Self {
        poly.vertices.into_iter().map(|p| [p.x, p.y]).collect()
    }
}

/// Tightest axis-aligned rectangle containing every vertex.
pub fn polygon_bounds(poly: &Polygon) -> Rect {
    let first = poly.vertices[0];
    poly.vertices[1..].iter().fold(
        Rect { x1: first.x, y1: first.y, x2: first.x, y2: first.y },
        |r, p| Rect { x1: r.x1.min(p.x), y1: r.y1.min(p.y), x2: r.x2.max(p.x), y2: r.y2.max(p.y) },
    )
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

// (p - s) . (q - s)
fn dot(p: Point, s: Point, q: Point) -> f64 {
    (p.x - s.x) * (q.x - s.x) + (p.y - s.y) * (q.y - s.y)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}
