//! The 41-channel heatmap stack: junction, opening end-point and icon-corner
//! likelihoods followed by room and icon semantic distributions.

mod io;
mod loss;
mod render;

pub use io::{decode_stack, encode_stack, LAYOUT_VERSION};
pub use loss::{sigmoid_ce, softmax_ce};
pub use render::render_ground_truth;

use std::ops::Range;

use crate::model::{Direction, IconKind, JunctionType, RoomKind, Violation};
use crate::raster::ChannelStack;

pub type HeatmapStack = ChannelStack;

pub const CHANNELS: usize = 41;
pub const JUNCTIONS: Range<usize> = 0..13;
pub const OPENING_ENDS: Range<usize> = 13..17;
pub const ICON_CORNERS: Range<usize> = 17..21;
pub const GEOMETRY: Range<usize> = 0..21;
pub const ROOM_SEMANTICS: Range<usize> = 21..31;
pub const ICON_SEMANTICS: Range<usize> = 31..41;
pub const ROOM_BACKGROUND: usize = 21;
pub const WALL: usize = 22;
pub const ICON_BACKGROUND: usize = 31;

pub const DISK_RADIUS: f64 = 11.0;
pub const WALL_RASTER_WIDTH: usize = 3;
pub const SEMANTIC_TOLERANCE: f64 = 1e-5;

pub const ICON_CORNER_NAMES: [&str; 4] = ["TL", "TR", "BR", "BL"];

pub fn junction_channel(j: JunctionType) -> usize {
    JUNCTIONS.start + j.index()
}

/// End-point channel, keyed by the direction pointing toward the other end.
pub fn opening_channel(toward: Direction) -> usize {
    OPENING_ENDS.start + toward.index()
}

pub fn icon_corner_channel(corner: usize) -> usize {
    ICON_CORNERS.start + corner
}

pub fn room_channel(kind: RoomKind) -> usize {
    WALL + 1 + kind.index()
}

pub fn icon_channel(kind: IconKind) -> usize {
    ICON_BACKGROUND + 1 + kind.index()
}

pub fn channel_names() -> Vec<String> {
    let mut names: Vec<String> = JunctionType::all().iter().map(|j| j.name()).collect();
    names.extend(Direction::ALL.iter().map(|d| format!("opening_{}", d.symbol())));
    names.extend(ICON_CORNER_NAMES.iter().map(|c| format!("icon_{c}")));
    names.push("room_background".into());
    names.push("room_wall".into());
    names.extend(RoomKind::ALL.iter().map(|k| format!("room_{k}")));
    names.push("icon_background".into());
    names.extend(IconKind::ALL.iter().map(|k| format!("icon_{k}")));
    names
}

/// Zero geometry with every pixel labelled background in both semantic groups.
pub fn blank_stack(resolution: usize) -> HeatmapStack {
    let mut s = ChannelStack::zeros(resolution, channel_names());
    s.plane_mut(ROOM_BACKGROUND).fill(1.0);
    s.plane_mut(ICON_BACKGROUND).fill(1.0);
    s
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HeatmapError {
    #[error("plan is invalid: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidPlan(Vec<Violation>),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("label {label} out of range for {classes} classes at pixel {pixel}")]
    LabelOutOfRange {
        pixel: usize,
        label: usize,
        classes: usize,
    },
    #[error("channel layout does not match: {0}")]
    Layout(String),
    #[error("{0}")]
    Format(String),
}

/// Checks the channel names and the value invariants of a stack: geometry in
/// [0, 1], each semantic group summing to 1 per pixel.
pub fn check_stack(stack: &HeatmapStack) -> Result<(), HeatmapError> {
    if stack.names() != channel_names().as_slice() {
        return Err(HeatmapError::Layout(format!(
            "expected the {CHANNELS}-channel layout, found {} channels",
            stack.channels()
        )));
    }
    for k in GEOMETRY {
        if let Some(v) = stack.plane(k).iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(HeatmapError::Layout(format!(
                "channel {} has value {v} outside [0, 1]",
                stack.names()[k]
            )));
        }
    }
    let n = stack.resolution() * stack.resolution();
    for group in [ROOM_SEMANTICS, ICON_SEMANTICS] {
        for i in 0..n {
            let sum: f64 = group.clone().map(|k| stack.plane(k)[i] as f64).sum();
            if (sum - 1.0).abs() > SEMANTIC_TOLERANCE {
                return Err(HeatmapError::Layout(format!(
                    "semantic group starting at {} sums to {sum} at pixel {i}",
                    stack.names()[group.start]
                )));
            }
        }
    }
    Ok(())
}
