//! Vector-graphics floorplan: corners, walls, openings, icons and typed rooms
//! in grid-pixel coordinates.

mod io;
mod junction;
mod svg;
mod validate;

pub use io::{load, save, LoadError, SaveError};
pub use junction::{Direction, DirectionSet, JunctionShape, JunctionType};
pub use svg::render_svg;
pub use validate::{validate, Entity, Violation, ViolationKind};

use crate::geometry::{Point, Rect};
use crate::pointcloud::FloorplanDomain;

/// Output grid side length in pixels.
pub const RESOLUTION: u32 = 256;

/// Axis-alignment tolerance in pixels for walls and opening placement.
pub const AXIS_TOLERANCE: f64 = 3.0;

pub const DEFAULT_WALL_THICKNESS: f64 = 3.0;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }

            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok($name::$variant),)+
                    _ => Err(s.to_string()),
                }
            }
        }

        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }
    };
}

named_enum!(
    OpeningKind {
        Door => "door",
        Window => "window",
    }
);

named_enum!(
    IconKind {
        Counter => "counter",
        Bathtub => "bathtub",
        Toilet => "toilet",
        Sink => "sink",
        Sofa => "sofa",
        Cabinet => "cabinet",
        Bed => "bed",
        Table => "table",
        Refrigerator => "refrigerator",
    }
);

named_enum!(
    RoomKind {
        LivingRoom => "living_room",
        Kitchen => "kitchen",
        Bedroom => "bedroom",
        Bathroom => "bathroom",
        Closet => "closet",
        Balcony => "balcony",
        Corridor => "corridor",
        DiningRoom => "dining_room",
    }
);

#[derive(Clone, Debug, PartialEq)]
pub struct Corner {
    pub id: u32,
    pub position: Point,
    pub junction: JunctionType,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wall {
    /// Corner ids.
    pub endpoints: (u32, u32),
    pub thickness: f64,
}

impl Wall {
    pub fn new(a: u32, b: u32) -> Self {
        Self {
            endpoints: (a, b),
            thickness: DEFAULT_WALL_THICKNESS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Opening {
    pub kind: OpeningKind,
    pub endpoints: [Point; 2],
    /// Index into [`Floorplan::walls`].
    pub host_wall: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Icon {
    pub kind: IconKind,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Room {
    pub kind: RoomKind,
    /// Counter-clockwise (positive shoelace area) simple polygon.
    pub boundary: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Floorplan {
    pub resolution: u32,
    pub corners: Vec<Corner>,
    pub walls: Vec<Wall>,
    pub openings: Vec<Opening>,
    pub icons: Vec<Icon>,
    pub rooms: Vec<Room>,
    pub domain: Option<FloorplanDomain>,
}

impl Default for Floorplan {
    fn default() -> Self {
        Self::empty()
    }
}

impl Floorplan {
    pub fn empty() -> Self {
        Self {
            resolution: RESOLUTION,
            corners: Vec::new(),
            walls: Vec::new(),
            openings: Vec::new(),
            icons: Vec::new(),
            rooms: Vec::new(),
            domain: None,
        }
    }

    pub fn corner(&self, id: u32) -> Option<&Corner> {
        self.corners.iter().find(|c| c.id == id)
    }

    /// Endpoint positions of wall `index`, if both corner ids resolve.
    pub fn wall_segment(&self, index: usize) -> Option<(Point, Point)> {
        let w = self.walls.get(index)?;
        Some((
            self.corner(w.endpoints.0)?.position,
            self.corner(w.endpoints.1)?.position,
        ))
    }

    pub fn wall_segments(&self) -> Vec<(Point, Point)> {
        (0..self.walls.len())
            .filter_map(|i| self.wall_segment(i))
            .collect()
    }

    pub fn corner_positions(&self) -> Vec<Point> {
        self.corners.iter().map(|c| c.position).collect()
    }
}
