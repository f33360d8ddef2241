//! Primitive candidates and their confidences, read off a heatmap stack:
//! junction peaks, axis-aligned wall pairs, opening end-point pairs and icon
//! rectangles.

mod icons;
mod openings;
mod peaks;
mod walls;

pub use icons::gen_icon_candidates;
pub use openings::gen_opening_candidates;
pub use peaks::{connected_components, extract_peaks, Component, ComponentSummary, MIN_AREA, PEAK_THRESHOLD};
pub use walls::{gen_wall_candidates, score_line, OPENING_STRIP_WIDTH, WALL_STRIP_WIDTH};

use serde_json::{json, Value};

use crate::geometry::{Point, Rect};
use crate::heatmap::{channel_names, junction_channel, HeatmapStack};
use crate::model::{IconKind, JunctionType};

/// Confidence at which a primitive's objective weight crosses zero.
pub const CONFIDENCE_OFFSET: f64 = 0.5;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExtractError {
    #[error("stack does not use the floorplan channel layout")]
    Layout,
    #[error("segment has zero length")]
    ZeroLength,
    #[error("strip width must be odd, got {0}")]
    EvenWidth(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CornerCandidate {
    pub position: Point,
    pub junction: JunctionType,
    pub component: Component,
    pub peak_value: f32,
}

impl CornerCandidate {
    pub fn weight(&self) -> f64 {
        self.peak_value as f64 - CONFIDENCE_OFFSET
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallCandidate {
    /// Indices into the corner candidates.
    pub a: usize,
    pub b: usize,
    pub horizontal: bool,
    /// Endpoints snapped onto the shared axis.
    pub segment: (Point, Point),
    pub confidence: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpeningCandidate {
    pub endpoints: [Point; 2],
    /// Wall candidates whose segment hosts both end-points.
    pub hosts: Vec<usize>,
    pub confidence: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IconCandidate {
    pub rect: Rect,
    pub kind: IconKind,
    pub confidence: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    pub corners: Vec<CornerCandidate>,
    pub walls: Vec<WallCandidate>,
    pub openings: Vec<OpeningCandidate>,
    pub icons: Vec<IconCandidate>,
}

fn pt(p: Point) -> Value {
    json!([p.x, p.y])
}

impl CandidateSet {
    pub fn to_json(&self) -> Value {
        json!({
            "corners": self.corners.iter().map(|c| json!({
                "position": pt(c.position),
                "junction": c.junction.name(),
                "component": c.component.summary(),
                "peak_value": c.peak_value,
                "weight": c.weight(),
            })).collect::<Vec<_>>(),
            "walls": self.walls.iter().map(|w| json!({
                "a": w.a,
                "b": w.b,
                "segment": [pt(w.segment.0), pt(w.segment.1)],
                "confidence": w.confidence,
                "weight": w.weight,
            })).collect::<Vec<_>>(),
            "openings": self.openings.iter().map(|o| json!({
                "endpoints": [pt(o.endpoints[0]), pt(o.endpoints[1])],
                "hosts": o.hosts,
                "confidence": o.confidence,
                "weight": o.weight,
            })).collect::<Vec<_>>(),
            "icons": self.icons.iter().map(|i| json!({
                "rect": [i.rect.xmin, i.rect.ymin, i.rect.xmax, i.rect.ymax],
                "kind": i.kind.as_str(),
                "confidence": i.confidence,
                "weight": i.weight,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn check_layout(stack: &HeatmapStack) -> Result<(), ExtractError> {
    if stack.names() == channel_names().as_slice() {
        Ok(())
    } else {
        Err(ExtractError::Layout)
    }
}

/// One candidate per surviving component of each junction channel, ordered by
/// position (row, column) then junction index.
pub fn extract_corners(stack: &HeatmapStack) -> Vec<CornerCandidate> {
    let res = stack.resolution();
    let mut out: Vec<CornerCandidate> = JunctionType::all()
        .into_iter()
        .flat_map(|j| {
            extract_peaks(stack.plane(junction_channel(j)), res)
                .into_iter()
                .map(move |component| CornerCandidate {
                    position: component.peak_point(),
                    junction: j,
                    peak_value: component.peak_value,
                    component,
                })
        })
        .collect();
    out.sort_by(|a, b| {
        (a.component.peak, a.junction.index()).cmp(&(b.component.peak, b.junction.index()))
    });
    out
}

pub fn extract_candidates(stack: &HeatmapStack) -> Result<CandidateSet, ExtractError> {
    check_layout(stack)?;
    let corners = extract_corners(stack);
    let walls = gen_wall_candidates(stack, &corners)?;
    let openings = gen_opening_candidates(stack, &walls)?;
    let icons = gen_icon_candidates(stack);
    Ok(CandidateSet {
        corners,
        walls,
        openings,
        icons,
    })
}
