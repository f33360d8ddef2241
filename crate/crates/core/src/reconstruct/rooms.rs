use std::collections::{HashMap, HashSet};

use crate::geometry::{is_simple, point_in_polygon, segment_distance, signed_area, simplify_collinear, Point};
use crate::heatmap::{room_channel, HeatmapStack};
use crate::model::{Room, RoomKind};

const ON_SEGMENT: f64 = 1e-7;
const KEY_SCALE: f64 = 1e6;

fn key(p: Point) -> (i64, i64) {
    ((p.x * KEY_SCALE).round() as i64, (p.y * KEY_SCALE).round() as i64)
}

fn param(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
}

fn crossing(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let denom = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
    if denom == 0.0 {
        return None;
    }
    let t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / denom;
    let u = ((c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x)) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| a.lerp(b, t))
}

struct Graph {
    points: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
}

/// Splits every segment at crossings and at end-points of other segments
/// lying on it, then merges coincident vertices and duplicate edges.
fn arrangement(segments: &[(Point, Point)]) -> Graph {
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut points = Vec::new();
    let mut id = |p: Point, points: &mut Vec<Point>| {
        *ids.entry(key(p)).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };
    let mut edges = Vec::new();
    for (i, &(a, b)) in segments.iter().enumerate() {
        if a == b {
            continue;
        }
        let mut cuts = vec![(0.0, a), (1.0, b)];
        for (j, &(c, d)) in segments.iter().enumerate() {
            if i == j {
                continue;
            }
            for p in [c, d] {
                if segment_distance(p, a, b) < ON_SEGMENT {
                    cuts.push((param(p, a, b), p));
                }
            }
            if let Some(p) = crossing(a, b, c, d) {
                cuts.push((param(p, a, b), p));
            }
        }
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let vs: Vec<usize> = cuts.iter().map(|&(_, p)| id(p, &mut points)).collect();
        for w in vs.windows(2) {
            if w[0] != w[1] {
                edges.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut adjacency = vec![Vec::new(); points.len()];
    for &(u, v) in &edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    Graph { points, adjacency }
}

fn prune_leaves(g: &mut Graph) {
    let mut stack: Vec<usize> = (0..g.points.len())
        .filter(|&v| g.adjacency[v].len() == 1)
        .collect();
    while let Some(v) = stack.pop() {
        let Some(&u) = g.adjacency[v].first() else {
            continue;
        };
        g.adjacency[v].clear();
        g.adjacency[u].retain(|&x| x != v);
        if g.adjacency[u].len() == 1 {
            stack.push(u);
        }
    }
}

/// Boundaries of the bounded faces, each as a positive-area vertex cycle.
fn bounded_faces(g: &Graph) -> Vec<Vec<Point>> {
    let pts = &g.points;
    let angle = |from: usize, to: usize| (pts[to].y - pts[from].y).atan2(pts[to].x - pts[from].x);
    let rings: Vec<Vec<usize>> = (0..pts.len())
        .map(|v| {
            let mut out = g.adjacency[v].clone();
            out.sort_by(|&a, &b| angle(v, a).total_cmp(&angle(v, b)));
            out
        })
        .collect();
    let mut visited: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = Vec::new();
    for u in 0..pts.len() {
        for &v in &rings[u] {
            if visited.contains(&(u, v)) {
                continue;
            }
            let mut cycle = Vec::new();
            let (mut a, mut b) = (u, v);
            while visited.insert((a, b)) {
                cycle.push(pts[a]);
                let ring = &rings[b];
                let k = ring.iter().position(|&x| x == a).expect("reverse half-edge");
                let next = ring[(k + ring.len() - 1) % ring.len()];
                (a, b) = (b, next);
            }
            if signed_area(&cycle) > 0.0 {
                faces.push(cycle);
            }
        }
    }
    faces
}

fn room_kind(stack: &HeatmapStack, poly: &[Point]) -> RoomKind {
    let res = stack.resolution();
    let max = res as f64 - 1.0;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in poly {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let mut sums = vec![0.0f64; RoomKind::ALL.len()];
    let (r0, r1) = (y0.ceil().max(0.0), y1.floor().min(max));
    let (c0, c1) = (x0.ceil().max(0.0), x1.floor().min(max));
    if r0 <= r1 && c0 <= c1 {
        for r in r0 as usize..=r1 as usize {
            for c in c0 as usize..=c1 as usize {
                if point_in_polygon(Point::new(c as f64, r as f64), poly) {
                    for (s, &k) in sums.iter_mut().zip(RoomKind::ALL) {
                        *s += stack.get(room_channel(k), r, c) as f64;
                    }
                }
            }
        }
    }
    let mut best = 0;
    for (i, &s) in sums.iter().enumerate() {
        if s > sums[best] {
            best = i;
        }
    }
    RoomKind::ALL[best]
}

fn canonical(mut poly: Vec<Point>) -> Vec<Point> {
    if let Some(start) = (0..poly.len()).min_by(|&i, &j| {
        poly[i]
            .y
            .total_cmp(&poly[j].y)
            .then(poly[i].x.total_cmp(&poly[j].x))
    }) {
        poly.rotate_left(start);
    }
    poly
}

/// Rooms from the bounded faces of the planar graph formed by `segments`,
/// typed by the strongest mean room-semantic channel inside each face.
pub fn assemble_rooms(segments: &[(Point, Point)], stack: &HeatmapStack) -> Vec<Room> {
    let mut g = arrangement(segments);
    prune_leaves(&mut g);
    let mut rooms: Vec<Room> = bounded_faces(&g)
        .into_iter()
        .map(|f| canonical(simplify_collinear(&f)))
        .filter(|f| is_simple(f) && signed_area(f) > 0.0)
        .map(|boundary| Room {
            kind: room_kind(stack, &boundary),
            boundary,
        })
        .collect();
    rooms.sort_by(|a, b| {
        let (p, q) = (a.boundary[0], b.boundary[0]);
        p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x))
    });
    rooms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::heatmap::blank_stack;

    fn rect_walls(r: Rect) -> Vec<(Point, Point)> {
        let c = r.corners();
        (0..4).map(|i| (c[i], c[(i + 1) % 4])).collect()
    }

    #[test]
    fn one_rectangle() {
        let r = Rect::new(20.0, 30.0, 120.0, 90.0);
        let rooms = assemble_rooms(&rect_walls(r), &blank_stack(256));
        assert_eq!(rooms.len(), 1);
        assert_eq!(rooms[0].boundary, r.to_polygon());
        assert_eq!(rooms[0].kind, RoomKind::LivingRoom);
    }

    #[test]
    fn open_u_shape() {
        let mut w = rect_walls(Rect::new(20.0, 30.0, 120.0, 90.0));
        w.remove(0);
        assert!(assemble_rooms(&w, &blank_stack(256)).is_empty());
        assert!(assemble_rooms(&[], &blank_stack(256)).is_empty());
    }

    #[test]
    fn dangling_spur_ignored() {
        let mut w = rect_walls(Rect::new(20.0, 30.0, 120.0, 90.0));
        w.push((Point::new(60.0, 30.0), Point::new(60.0, 60.0)));
        let rooms = assemble_rooms(&w, &blank_stack(256));
        assert_eq!(rooms.len(), 1);
        assert_eq!(rooms[0].boundary.len(), 4);
    }

    #[test]
    fn crossing_walls_split_faces() {
        let mut w = rect_walls(Rect::new(0.0, 0.0, 100.0, 100.0));
        w.push((Point::new(50.0, 0.0), Point::new(50.0, 100.0)));
        w.push((Point::new(0.0, 50.0), Point::new(100.0, 50.0)));
        let rooms = assemble_rooms(&w, &blank_stack(256));
        assert_eq!(rooms.len(), 4);
        for r in &rooms {
            assert_eq!(signed_area(&r.boundary), 2500.0);
        }
    }
}
