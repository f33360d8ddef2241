use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Direction, DirectionSet, Floorplan, AXIS_TOLERANCE};
use crate::geometry::{is_simple, segment_distance, signed_area, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Plan,
    Corner(u32),
    Wall(usize),
    Opening(usize),
    Icon(usize),
    Room(usize),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Plan => write!(f, "plan"),
            Entity::Corner(id) => write!(f, "corner {id}"),
            Entity::Wall(i) => write!(f, "wall {i}"),
            Entity::Opening(i) => write!(f, "opening {i}"),
            Entity::Icon(i) => write!(f, "icon {i}"),
            Entity::Room(i) => write!(f, "room {i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    BadResolution,
    NonFinite,
    OutOfBounds,
    DuplicateId,
    DanglingCorner,
    DegenerateWall,
    NotAxisAligned,
    JunctionMismatch,
    DanglingWall,
    OpeningOffWall,
    EmptyIcon,
    DegenerateRoom,
    SelfIntersectingRoom,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::BadResolution => "resolution must be positive",
            ViolationKind::NonFinite => "non-finite coordinate",
            ViolationKind::OutOfBounds => "outside the grid",
            ViolationKind::DuplicateId => "duplicate corner id",
            ViolationKind::DanglingCorner => "wall references a missing corner",
            ViolationKind::DegenerateWall => "wall endpoints coincide",
            ViolationKind::NotAxisAligned => "wall is not axis-aligned",
            ViolationKind::JunctionMismatch => "junction/incidence mismatch",
            ViolationKind::DanglingWall => "opening references a missing wall",
            ViolationKind::OpeningOffWall => "opening end-point off its host wall",
            ViolationKind::EmptyIcon => "icon rectangle has no area",
            ViolationKind::DegenerateRoom => "room polygon has no positive area",
            ViolationKind::SelfIntersectingRoom => "room polygon is not simple",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub entity: Entity,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.kind.describe())
    }
}

/// Checks every structural invariant of a floorplan. An empty result means
/// the plan is valid.
pub fn validate(plan: &Floorplan) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity, kind| out.push(Violation { entity, kind });
    if plan.resolution == 0 {
        push(Entity::Plan, ViolationKind::BadResolution);
    }
    let res = plan.resolution as f64;
    let in_grid = |p: Point| p.x >= 0.0 && p.x < res && p.y >= 0.0 && p.y < res;
    let finite = |p: Point| p.x.is_finite() && p.y.is_finite();

    let mut by_id: HashMap<u32, Point> = HashMap::new();
    for c in &plan.corners {
        if by_id.insert(c.id, c.position).is_some() {
            push(Entity::Corner(c.id), ViolationKind::DuplicateId);
        }
        if !finite(c.position) {
            push(Entity::Corner(c.id), ViolationKind::NonFinite);
        } else if !in_grid(c.position) {
            push(Entity::Corner(c.id), ViolationKind::OutOfBounds);
        }
    }

    let mut incident: HashMap<u32, Vec<Direction>> = HashMap::new();
    let mut good_walls = HashSet::new();
    for (i, w) in plan.walls.iter().enumerate() {
        let (a, b) = w.endpoints;
        let (Some(&pa), Some(&pb)) = (by_id.get(&a), by_id.get(&b)) else {
            push(Entity::Wall(i), ViolationKind::DanglingCorner);
            continue;
        };
        if a == b || pa == pb {
            push(Entity::Wall(i), ViolationKind::DegenerateWall);
            continue;
        }
        let (dx, dy) = (pb.x - pa.x, pb.y - pa.y);
        if dx.abs() > AXIS_TOLERANCE && dy.abs() > AXIS_TOLERANCE {
            push(Entity::Wall(i), ViolationKind::NotAxisAligned);
            continue;
        }
        if let Some(d) = Direction::of_vector(dx, dy) {
            incident.entry(a).or_default().push(d);
            incident.entry(b).or_default().push(d.opposite());
        }
        good_walls.insert(i);
    }

    for c in &plan.corners {
        let dirs = incident.get(&c.id).map(Vec::as_slice).unwrap_or(&[]);
        let set: DirectionSet = dirs.iter().copied().collect();
        if set.len() != dirs.len() || set != c.junction.directions() {
            push(Entity::Corner(c.id), ViolationKind::JunctionMismatch);
        }
    }

    for (i, o) in plan.openings.iter().enumerate() {
        if !good_walls.contains(&o.host_wall) {
            push(Entity::Opening(i), ViolationKind::DanglingWall);
            continue;
        }
        let (a, b) = plan
            .wall_segment(o.host_wall)
            .expect("host wall resolved above");
        if o
            .endpoints
            .iter()
            .any(|&p| !finite(p) || segment_distance(p, a, b) > AXIS_TOLERANCE)
        {
            push(Entity::Opening(i), ViolationKind::OpeningOffWall);
        }
    }

    for (i, icon) in plan.icons.iter().enumerate() {
        let r = icon.rect;
        let corners = r.corners();
        if corners.iter().any(|&p| !finite(p)) {
            push(Entity::Icon(i), ViolationKind::NonFinite);
        } else if !(r.xmax > r.xmin && r.ymax > r.ymin) {
            push(Entity::Icon(i), ViolationKind::EmptyIcon);
        } else if !corners.iter().all(|&p| in_grid(p)) {
            push(Entity::Icon(i), ViolationKind::OutOfBounds);
        }
    }

    for (i, room) in plan.rooms.iter().enumerate() {
        let poly = &room.boundary;
        if poly.iter().any(|&p| !finite(p)) {
            push(Entity::Room(i), ViolationKind::NonFinite);
        } else if poly.len() < 3 || signed_area(poly) <= 0.0 {
            push(Entity::Room(i), ViolationKind::DegenerateRoom);
        } else if !is_simple(poly) {
            push(Entity::Room(i), ViolationKind::SelfIntersectingRoom);
        }
    }
    out
}
