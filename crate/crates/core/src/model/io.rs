//! Floorplan JSON document (`version` 1).

use std::collections::HashSet;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{
    validate, Corner, Floorplan, Icon, IconKind, JunctionType, Opening, OpeningKind, Room,
    RoomKind, Violation, Wall, DEFAULT_WALL_THICKNESS,
};
use crate::geometry::{Point, Rect};
use crate::pointcloud::FloorplanDomain;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: unknown {what} `{value}`")]
    UnknownVariant {
        path: String,
        what: &'static str,
        value: String,
    },
    #[error("{path}: dangling reference to {what} {id}")]
    DanglingId {
        path: String,
        what: &'static str,
        id: u64,
    },
}

impl LoadError {
    pub fn path(&self) -> Option<&str> {
        match self {
            LoadError::Syntax(_) => None,
            LoadError::Schema { path, .. }
            | LoadError::UnknownVariant { path, .. }
            | LoadError::DanglingId { path, .. } => Some(path),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("floorplan fails validation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct SaveError(pub Vec<Violation>);

#[derive(Serialize)]
struct DocOut {
    version: u64,
    resolution: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<DomainOut>,
    corners: Vec<CornerOut>,
    walls: Vec<WallOut>,
    openings: Vec<OpeningOut>,
    icons: Vec<IconOut>,
    rooms: Vec<RoomOut>,
}

#[derive(Serialize)]
struct DomainOut {
    origin: [f64; 2],
    scale: f64,
    resolution: u32,
}

#[derive(Serialize)]
struct CornerOut {
    id: u32,
    x: f64,
    y: f64,
    junction: String,
}

#[derive(Serialize)]
struct WallOut {
    a: u32,
    b: u32,
    #[serde(skip_serializing_if = "is_default_thickness")]
    thickness: f64,
}

fn is_default_thickness(t: &f64) -> bool {
    *t == DEFAULT_WALL_THICKNESS
}

#[derive(Serialize)]
struct OpeningOut {
    kind: OpeningKind,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    wall: usize,
}

#[derive(Serialize)]
struct IconOut {
    kind: IconKind,
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
}

#[derive(Serialize)]
struct RoomOut {
    kind: RoomKind,
    polygon: Vec<[f64; 2]>,
}

/// Serializes a valid floorplan as pretty-printed JSON.
pub fn save(plan: &Floorplan) -> Result<Vec<u8>, SaveError> {
    let violations = validate(plan);
    if !violations.is_empty() {
        return Err(SaveError(violations));
    }
    let doc = DocOut {
        version: FORMAT_VERSION,
        resolution: plan.resolution,
        domain: plan.domain.map(|d| DomainOut {
            origin: d.origin,
            scale: d.scale,
            resolution: d.resolution,
        }),
        corners: plan
            .corners
            .iter()
            .map(|c| CornerOut {
                id: c.id,
                x: c.position.x,
                y: c.position.y,
                junction: c.junction.name(),
            })
            .collect(),
        walls: plan
            .walls
            .iter()
            .map(|w| WallOut {
                a: w.endpoints.0,
                b: w.endpoints.1,
                thickness: w.thickness,
            })
            .collect(),
        openings: plan
            .openings
            .iter()
            .map(|o| OpeningOut {
                kind: o.kind,
                x1: o.endpoints[0].x,
                y1: o.endpoints[0].y,
                x2: o.endpoints[1].x,
                y2: o.endpoints[1].y,
                wall: o.host_wall,
            })
            .collect(),
        icons: plan
            .icons
            .iter()
            .map(|i| IconOut {
                kind: i.kind,
                xmin: i.rect.xmin,
                ymin: i.rect.ymin,
                xmax: i.rect.xmax,
                ymax: i.rect.ymax,
            })
            .collect(),
        rooms: plan
            .rooms
            .iter()
            .map(|r| RoomOut {
                kind: r.kind,
                polygon: r.boundary.iter().map(|p| [p.x, p.y]).collect(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("document serializes");
    bytes.push(b'\n');
    Ok(bytes)
}

fn schema(path: &str, message: impl Into<String>) -> LoadError {
    LoadError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, LoadError> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, LoadError> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing required key"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, LoadError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64, LoadError> {
    v.as_f64().ok_or_else(|| schema(path, "expected a number"))
}

fn unsigned(v: &Value, path: &str) -> Result<u64, LoadError> {
    v.as_u64()
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn num_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64, LoadError> {
    number(field(obj, key, path)?, &format!("{path}.{key}"))
}

fn enum_field<T: std::str::FromStr>(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    what: &'static str,
) -> Result<T, LoadError> {
    let p = format!("{path}.{key}");
    let s = field(obj, key, path)?
        .as_str()
        .ok_or_else(|| schema(&p, "expected a string"))?;
    s.parse().map_err(|_| LoadError::UnknownVariant {
        path: p,
        what,
        value: s.to_string(),
    })
}

fn u32_from(v: u64, path: &str) -> Result<u32, LoadError> {
    u32::try_from(v).map_err(|_| schema(path, "integer out of range"))
}

/// Parses a floorplan document. Structural problems are reported with a
/// JSONPath-style location such as `$.walls[2].b`.
pub fn load(bytes: &[u8]) -> Result<Floorplan, LoadError> {
    let root: Value =
        serde_json::from_slice(bytes).map_err(|e| LoadError::Syntax(e.to_string()))?;
    let top = object(&root, "$")?;

    let version = unsigned(field(top, "version", "$")?, "$.version")?;
    if version != FORMAT_VERSION {
        return Err(schema("$.version", format!("unsupported version {version}")));
    }
    let resolution = u32_from(
        unsigned(field(top, "resolution", "$")?, "$.resolution")?,
        "$.resolution",
    )?;
    if resolution == 0 {
        return Err(schema("$.resolution", "must be positive"));
    }

    let domain = match top.get("domain") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let d = object(v, "$.domain")?;
            let origin = array(field(d, "origin", "$.domain")?, "$.domain.origin")?;
            if origin.len() != 2 {
                return Err(schema("$.domain.origin", "expected [x, y]"));
            }
            let scale = num_field(d, "scale", "$.domain")?;
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(schema("$.domain.scale", "must be positive"));
            }
            let dres = match d.get("resolution") {
                Some(v) => u32_from(unsigned(v, "$.domain.resolution")?, "$.domain.resolution")?,
                None => resolution,
            };
            Some(FloorplanDomain {
                origin: [
                    number(&origin[0], "$.domain.origin[0]")?,
                    number(&origin[1], "$.domain.origin[1]")?,
                ],
                scale,
                resolution: dres,
            })
        }
    };

    let mut corners = Vec::new();
    let mut ids = HashSet::new();
    for (i, v) in array(field(top, "corners", "$")?, "$.corners")?.iter().enumerate() {
        let path = format!("$.corners[{i}]");
        let c = object(v, &path)?;
        let id = u32_from(unsigned(field(c, "id", &path)?, &format!("{path}.id"))?, &path)?;
        if !ids.insert(id) {
            return Err(schema(&format!("{path}.id"), format!("duplicate corner id {id}")));
        }
        corners.push(Corner {
            id,
            position: Point::new(num_field(c, "x", &path)?, num_field(c, "y", &path)?),
            junction: enum_field::<JunctionType>(c, "junction", &path, "junction type")?,
        });
    }

    let mut walls = Vec::new();
    for (i, v) in array(field(top, "walls", "$")?, "$.walls")?.iter().enumerate() {
        let path = format!("$.walls[{i}]");
        let w = object(v, &path)?;
        let end = |key: &str| -> Result<u32, LoadError> {
            let p = format!("{path}.{key}");
            let id = unsigned(field(w, key, &path)?, &p)?;
            if !ids.contains(&(id as u32)) || id > u32::MAX as u64 {
                return Err(LoadError::DanglingId {
                    path: p,
                    what: "corner",
                    id,
                });
            }
            Ok(id as u32)
        };
        let a = end("a")?;
        let b = end("b")?;
        let thickness = match w.get("thickness") {
            Some(t) => number(t, &format!("{path}.thickness"))?,
            None => DEFAULT_WALL_THICKNESS,
        };
        walls.push(Wall {
            endpoints: (a, b),
            thickness,
        });
    }

    let mut openings = Vec::new();
    for (i, v) in array(field(top, "openings", "$")?, "$.openings")?
        .iter()
        .enumerate()
    {
        let path = format!("$.openings[{i}]");
        let o = object(v, &path)?;
        let kind = enum_field::<OpeningKind>(o, "kind", &path, "opening kind")?;
        let endpoints = [
            Point::new(num_field(o, "x1", &path)?, num_field(o, "y1", &path)?),
            Point::new(num_field(o, "x2", &path)?, num_field(o, "y2", &path)?),
        ];
        let wp = format!("{path}.wall");
        let wall = unsigned(field(o, "wall", &path)?, &wp)?;
        if wall as usize >= walls.len() {
            return Err(LoadError::DanglingId {
                path: wp,
                what: "wall",
                id: wall,
            });
        }
        openings.push(Opening {
            kind,
            endpoints,
            host_wall: wall as usize,
        });
    }

    let mut icons = Vec::new();
    for (i, v) in array(field(top, "icons", "$")?, "$.icons")?.iter().enumerate() {
        let path = format!("$.icons[{i}]");
        let o = object(v, &path)?;
        icons.push(Icon {
            kind: enum_field::<IconKind>(o, "kind", &path, "icon kind")?,
            rect: Rect::new(
                num_field(o, "xmin", &path)?,
                num_field(o, "ymin", &path)?,
                num_field(o, "xmax", &path)?,
                num_field(o, "ymax", &path)?,
            ),
        });
    }

    let mut rooms = Vec::new();
    for (i, v) in array(field(top, "rooms", "$")?, "$.rooms")?.iter().enumerate() {
        let path = format!("$.rooms[{i}]");
        let o = object(v, &path)?;
        let kind = enum_field::<RoomKind>(o, "kind", &path, "room kind")?;
        let pp = format!("{path}.polygon");
        let mut boundary = Vec::new();
        for (k, pv) in array(field(o, "polygon", &path)?, &pp)?.iter().enumerate() {
            let vp = format!("{pp}[{k}]");
            let xy = array(pv, &vp)?;
            if xy.len() != 2 {
                return Err(schema(&vp, "expected [x, y]"));
            }
            boundary.push(Point::new(
                number(&xy[0], &format!("{vp}[0]"))?,
                number(&xy[1], &format!("{vp}[1]"))?,
            ));
        }
        rooms.push(Room { kind, boundary });
    }

    Ok(Floorplan {
        resolution,
        corners,
        walls,
        openings,
        icons,
        rooms,
        domain,
    })
}
