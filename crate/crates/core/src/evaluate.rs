//! Corner, opening, icon, room and relationship metrics plus the wall
//! line-distance metric.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::geometry::{collinear_overlap, polygon_iou, Point};
use crate::model::{Floorplan, OpeningKind, AXIS_TOLERANCE};

pub const DISTANCE_THRESHOLD: f64 = 10.0;
pub const ICON_IOU: f64 = 0.5;
pub const ROOM_IOU: f64 = 0.7;
pub const RELATIONSHIP_IOU: f64 = 0.5;
pub const LINE_SAMPLES: usize = 100;
/// Minimum collinear overlap for a door to lie on a room's boundary.
pub const DOOR_OVERLAP_PX: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub matches: usize,
    pub predicted: usize,
    pub ground_truth: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

impl PrecisionRecall {
    pub fn new(matches: usize, predicted: usize, ground_truth: usize) -> Self {
        Self {
            precision: ratio(matches, predicted),
            recall: ratio(matches, ground_truth),
            matches,
            predicted,
            ground_truth,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("{0} plan has no walls")]
    NoWalls(&'static str),
}

/// One-to-one greedy matching over scored pairs, best score first; ties go
/// to the smaller (pred, gt) index pair. Returns `(pred, gt)` pairs.
fn greedy(
    n_pred: usize,
    n_gt: usize,
    mut pairs: Vec<(f64, usize, usize)>,
    lower_is_better: bool,
) -> Vec<(usize, usize)> {
    pairs.sort_by(|a, b| {
        let o = if lower_is_better { a.0.total_cmp(&b.0) } else { b.0.total_cmp(&a.0) };
        o.then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    let mut used_p = vec![false; n_pred];
    let mut used_g = vec![false; n_gt];
    let mut out = Vec::new();
    for (_, p, g) in pairs {
        if !used_p[p] && !used_g[g] {
            used_p[p] = true;
            used_g[g] = true;
            out.push((p, g));
        }
    }
    out
}

pub fn match_corners(pred: &[Point], gt: &[Point]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, &p) in pred.iter().enumerate() {
        for (j, &g) in gt.iter().enumerate() {
            let d = p.distance(g);
            if d < DISTANCE_THRESHOLD {
                pairs.push((d, i, j));
            }
        }
    }
    greedy(pred.len(), gt.len(), pairs, true)
}

/// Nearest-first matching of corner positions under the 10 px rule.
pub fn eval_corners(pred: &[Point], gt: &[Point]) -> PrecisionRecall {
    PrecisionRecall::new(match_corners(pred, gt).len(), pred.len(), gt.len())
}

fn endpoint_distance(a: [Point; 2], b: [Point; 2]) -> f64 {
    let straight = a[0].distance(b[0]).max(a[1].distance(b[1]));
    let crossed = a[0].distance(b[1]).max(a[1].distance(b[0]));
    straight.min(crossed)
}

pub fn eval_openings(pred: &Floorplan, gt: &Floorplan) -> PrecisionRecall {
    let mut pairs = Vec::new();
    for (i, p) in pred.openings.iter().enumerate() {
        for (j, g) in gt.openings.iter().enumerate() {
            let d = endpoint_distance(p.endpoints, g.endpoints);
            if p.kind == g.kind && d < DISTANCE_THRESHOLD {
                pairs.push((d, i, j));
            }
        }
    }
    let m = greedy(pred.openings.len(), gt.openings.len(), pairs, true);
    PrecisionRecall::new(m.len(), pred.openings.len(), gt.openings.len())
}

pub fn eval_icons(pred: &Floorplan, gt: &Floorplan) -> PrecisionRecall {
    let mut pairs = Vec::new();
    for (i, p) in pred.icons.iter().enumerate() {
        for (j, g) in gt.icons.iter().enumerate() {
            let iou = p.rect.iou(&g.rect);
            if p.kind == g.kind && iou > ICON_IOU {
                pairs.push((iou, i, j));
            }
        }
    }
    let m = greedy(pred.icons.len(), gt.icons.len(), pairs, false);
    PrecisionRecall::new(m.len(), pred.icons.len(), gt.icons.len())
}

/// Room pairs with polygon IOU above `threshold`, matched best-first.
pub fn match_rooms(pred: &Floorplan, gt: &Floorplan, threshold: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, p) in pred.rooms.iter().enumerate() {
        for (j, g) in gt.rooms.iter().enumerate() {
            let iou = polygon_iou(&p.boundary, &g.boundary);
            if iou > threshold {
                pairs.push((iou, i, j));
            }
        }
    }
    greedy(pred.rooms.len(), gt.rooms.len(), pairs, false)
}

/// Room matching ignores room type.
pub fn eval_rooms(pred: &Floorplan, gt: &Floorplan) -> PrecisionRecall {
    let m = match_rooms(pred, gt, ROOM_IOU);
    PrecisionRecall::new(m.len(), pred.rooms.len(), gt.rooms.len())
}

fn on_boundary(seg: (Point, Point), boundary: &[Point]) -> bool {
    let n = boundary.len();
    (0..n).any(|k| {
        let edge = (boundary[k], boundary[(k + 1) % n]);
        collinear_overlap(seg, edge, AXIS_TOLERANCE) >= DOOR_OVERLAP_PX
    })
}

/// Room adjacency through doors: two rooms are connected when a door
/// segment lies along both boundaries.
pub fn door_graph(plan: &Floorplan) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); plan.rooms.len()];
    for o in plan.openings.iter().filter(|o| o.kind == OpeningKind::Door) {
        let seg = (o.endpoints[0], o.endpoints[1]);
        let touching: Vec<usize> = (0..plan.rooms.len())
            .filter(|&r| on_boundary(seg, &plan.rooms[r].boundary))
            .collect();
        for &a in &touching {
            for &b in &touching {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    adj
}

/// Fraction of ground-truth rooms whose door neighbourhood, neighbour IOUs
/// and room types are all reproduced.
pub fn eval_relationships(pred: &Floorplan, gt: &Floorplan) -> f64 {
    if gt.rooms.is_empty() {
        return 1.0;
    }
    let mut to_pred = vec![None; gt.rooms.len()];
    for (p, g) in match_rooms(pred, gt, RELATIONSHIP_IOU) {
        to_pred[g] = Some(p);
    }
    let gt_adj = door_graph(gt);
    let pred_adj = door_graph(pred);
    let typed = |g: usize| to_pred[g].is_some_and(|p| pred.rooms[p].kind == gt.rooms[g].kind);
    let correct = (0..gt.rooms.len())
        .filter(|&g| {
            if !typed(g) || !gt_adj[g].iter().all(|&n| typed(n)) {
                return false;
            }
            let want: BTreeSet<usize> = gt_adj[g].iter().map(|&n| to_pred[n].unwrap()).collect();
            pred_adj[to_pred[g].unwrap()] == want
        })
        .count();
    correct as f64 / gt.rooms.len() as f64
}

fn sample_walls(plan: &Floorplan) -> Vec<Point> {
    let mut out = Vec::with_capacity(plan.walls.len() * LINE_SAMPLES);
    for (a, b) in plan.wall_segments() {
        for i in 0..LINE_SAMPLES {
            out.push(a.lerp(b, i as f64 / (LINE_SAMPLES - 1) as f64));
        }
    }
    out
}

fn one_way(from: &[Point], to: &[Point]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|p| to.iter().map(|q| p.distance(*q)).fold(f64::INFINITY, f64::min))
        .sum();
    total / from.len() as f64
}

/// Symmetric mean nearest-sample distance between the two plans' walls.
pub fn wall_line_distance(pred: &Floorplan, gt: &Floorplan) -> Result<f64, EvalError> {
    let p = sample_walls(pred);
    let g = sample_walls(gt);
    if p.is_empty() {
        return Err(EvalError::NoWalls("predicted"));
    }
    if g.is_empty() {
        return Err(EvalError::NoWalls("ground-truth"));
    }
    Ok(0.5 * (one_way(&p, &g) + one_way(&g, &p)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub corner: PrecisionRecall,
    pub opening: PrecisionRecall,
    pub icon: PrecisionRecall,
    pub room: PrecisionRecall,
    pub relationship: f64,
    /// Absent when either plan has no walls.
    pub line_distance: Option<f64>,
}

pub fn evaluate(pred: &Floorplan, gt: &Floorplan) -> MetricReport {
    MetricReport {
        corner: eval_corners(&pred.corner_positions(), &gt.corner_positions()),
        opening: eval_openings(pred, gt),
        icon: eval_icons(pred, gt),
        room: eval_rooms(pred, gt),
        relationship: eval_relationships(pred, gt),
        line_distance: wall_line_distance(pred, gt).ok(),
    }
}

impl MetricReport {
    /// Aligned text table: wall (corner), door (opening), icon, room,
    /// relationship.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let pct = |v: f64| format!("{:.1}", 100.0 * v);
        let _ = writeln!(
            s,
            "{:<10}{:>8}{:>8}{:>8}{:>8}{:>14}",
            "", "wall", "door", "icon", "room", "relationship"
        );
        for (label, get) in [
            ("precision", (|p: &PrecisionRecall| p.precision) as fn(&PrecisionRecall) -> f64),
            ("recall", |p: &PrecisionRecall| p.recall),
        ] {
            let _ = writeln!(
                s,
                "{:<10}{:>8}{:>8}{:>8}{:>8}{:>14}",
                label,
                pct(get(&self.corner)),
                pct(get(&self.opening)),
                pct(get(&self.icon)),
                pct(get(&self.room)),
                if label == "precision" { pct(self.relationship) } else { String::new() },
            );
        }
        match self.line_distance {
            Some(d) => {
                let _ = writeln!(s, "line distance: {d:.3} px");
            }
            None => s.push_str("line distance: n/a\n"),
        }
        s
    }
}
