//! Planar geometry helpers shared by rasterization, reconstruction and
//! evaluation. Coordinates are grid pixels; polygons are vertex lists whose
//! shoelace area is positive when counter-clockwise.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub const fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }

    pub fn from_corners(a: Point, b: Point) -> Self {
        Self::new(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y))
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let w = self.xmax.min(other.xmax) - self.xmin.max(other.xmin);
        let h = self.ymax.min(other.ymax) - self.ymin.max(other.ymin);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Corners in top-left, top-right, bottom-right, bottom-left order.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin, self.ymin),
            Point::new(self.xmax, self.ymin),
            Point::new(self.xmax, self.ymax),
            Point::new(self.xmin, self.ymax),
        ]
    }

    pub fn to_polygon(&self) -> Vec<Point> {
        self.corners().to_vec()
    }
}

/// Half the shoelace sum; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc * 0.5
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    signed_area(poly).abs()
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * dx, a.y + t * dy))
}

fn on_boundary(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    (0..n).any(|i| segment_distance(p, poly[i], poly[(i + 1) % n]) < 1e-9)
}

/// Even-odd containment; points on the boundary count as inside.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    if poly.len() < 3 {
        return false;
    }
    if on_boundary(p, poly) {
        return true;
    }
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// True when no two non-adjacent edges touch and no adjacent edges overlap.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex is fine; folding back onto the previous edge is not.
                let shared = if j == i + 1 { b } else { a };
                let other_i = if j == i + 1 { a } else { b };
                let other_j = if j == i + 1 { d } else { c };
                if orient(shared, other_i, other_j) == 0.0 {
                    let u = (other_i.x - shared.x, other_i.y - shared.y);
                    let v = (other_j.x - shared.x, other_j.y - shared.y);
                    if u.0 * v.0 + u.1 * v.1 > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Drops vertices lying on the straight line through their neighbours.
pub fn simplify_collinear(poly: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = poly.to_vec();
    pts.dedup();
    if pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() > 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            if orient(prev, pts[i], next).abs() < 1e-9 {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

fn crossings_at(poly: &[Point], y: f64, out: &mut Vec<f64>) {
    out.clear();
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > y) != (b.y > y) {
            out.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    out.sort_by(|p, q| p.total_cmp(q));
}

fn proper_crossing_y(a: Point, b: Point, c: Point, d: Point) -> Option<f64> {
    let denom = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
    if denom == 0.0 {
        return None;
    }
    let t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / denom;
    let u = ((c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x)) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(a.y + t * (b.y - a.y))
    } else {
        None
    }
}

/// Exact intersection area of two simple polygons.
///
/// The plane is cut into horizontal slabs at every vertex height and edge
/// crossing. Inside a slab the covered length of each polygon, and of the
/// intersection, is linear in y, so the midpoint rule is exact.
pub fn polygon_intersection_area(a: &[Point], b: &[Point]) -> f64 {
    if a.len() < 3 || b.len() < 3 {
        return 0.0;
    }
    let mut ys: Vec<f64> = a.iter().chain(b.iter()).map(|p| p.y).collect();
    for i in 0..a.len() {
        let (p, q) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            let (r, s) = (b[j], b[(j + 1) % b.len()]);
            if let Some(y) = proper_crossing_y(p, q, r, s) {
                ys.push(y);
            }
        }
    }
    ys.sort_by(|p, q| p.total_cmp(q));
    ys.dedup();
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    let mut area = 0.0;
    for w in ys.windows(2) {
        let (y0, y1) = (w[0], w[1]);
        if y1 <= y0 {
            continue;
        }
        let ym = 0.5 * (y0 + y1);
        crossings_at(a, ym, &mut xa);
        crossings_at(b, ym, &mut xb);
        let mut len = 0.0;
        for ia in xa.chunks_exact(2) {
            for ib in xb.chunks_exact(2) {
                let lo = ia[0].max(ib[0]);
                let hi = ia[1].min(ib[1]);
                if hi > lo {
                    len += hi - lo;
                }
            }
        }
        area += len * (y1 - y0);
    }
    area
}

pub fn polygon_iou(a: &[Point], b: &[Point]) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = polygon_area(a) + polygon_area(b) - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Length along which two axis-aligned segments lie on a common line,
/// allowing an offset of `tolerance` between the lines.
pub fn collinear_overlap(a: (Point, Point), b: (Point, Point), tolerance: f64) -> f64 {
    let horizontal = |s: (Point, Point)| (s.1.x - s.0.x).abs() >= (s.1.y - s.0.y).abs();
    let ha = horizontal(a);
    if ha != horizontal(b) {
        return 0.0;
    }
    let (off_a, off_b, lo_a, hi_a, lo_b, hi_b) = if ha {
        (
            0.5 * (a.0.y + a.1.y),
            0.5 * (b.0.y + b.1.y),
            a.0.x.min(a.1.x),
            a.0.x.max(a.1.x),
            b.0.x.min(b.1.x),
            b.0.x.max(b.1.x),
        )
    } else {
        (
            0.5 * (a.0.x + a.1.x),
            0.5 * (b.0.x + b.1.x),
            a.0.y.min(a.1.y),
            a.0.y.max(a.1.y),
            b.0.y.min(b.1.y),
            b.0.y.max(b.1.y),
        )
    };
    if (off_a - off_b).abs() > tolerance {
        return 0.0;
    }
    (hi_a.min(hi_b) - lo_a.max(lo_b)).max(0.0)
}
