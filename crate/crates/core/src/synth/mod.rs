//! Synthetic floorplans, scans and heatmap corruption for testing the
//! pipeline without real data.

mod corrupt;
mod scan;

pub use corrupt::corrupt_heatmaps;
pub use scan::{sample_scan, ScanError, WALL_HEIGHT_M, POSITION_SIGMA_M};

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{collinear_overlap, segment_distance, Point, Rect};
use crate::model::{
    Corner, Direction, DirectionSet, Floorplan, Icon, IconKind, JunctionType, Opening, OpeningKind, Room,
    RoomKind, Wall,
};
use crate::pointcloud::FloorplanDomain;

/// Long side of the outer footprint in pixels, and its start offset.
pub const FOOTPRINT_PX: i64 = 232;
pub const FOOTPRINT_OFFSET: i64 = 12;
pub const MIN_ROOM_SIDE_M: f64 = 1.5;
pub const MIN_ROOM_SIDE_PX: i64 = 30;
/// Distinct parallel wall lines stay at least this far apart so corner disks
/// on different lines never share rows or columns.
pub const LINE_GAP_PX: i64 = 24;
/// Same-channel disks (opening ends, icon corners) keep this spacing.
pub const DISK_GAP_PX: f64 = 24.0;
const OPENING_MARGIN_PX: i64 = 3;
const OPENING_GAP_PX: f64 = 4.0;
const ICON_MARGIN_PX: f64 = 4.0;
const DOOR_M: f64 = 0.9;
const WINDOW_M: f64 = 1.2;
const MIN_AREA_M2: f64 = 20.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub heatmap_sigma: f64,
    pub dropout_prob: f64,
    pub jitter_px: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            heatmap_sigma: 0.0,
            dropout_prob: 0.0,
            jitter_px: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub room_count_mean: f64,
    pub room_count_std: f64,
    pub icon_count_mean: f64,
    pub icon_count_std: f64,
    pub opening_count_mean: f64,
    pub opening_count_std: f64,
    /// Informational; corner counts emerge from the room layout.
    pub corner_count_mean: f64,
    pub area_mean_m2: f64,
    pub area_std_m2: f64,
    pub noise: NoiseConfig,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            room_count_mean: 5.2,
            room_count_std: 1.8,
            icon_count_mean: 9.1,
            icon_count_std: 4.5,
            opening_count_mean: 9.9,
            opening_count_std: 2.9,
            corner_count_mean: 18.1,
            area_mean_m2: 63.8,
            area_std_m2: 13.0,
            noise: NoiseConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SynthError {
    #[error("invalid config field `{0}`")]
    InvalidConfig(&'static str),
}

impl SynthConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Counts may be forced to zero with a zero mean and deviation.
    pub fn validate(&self) -> Result<(), SynthError> {
        let checks: [(&'static str, f64, bool); 12] = [
            ("room_count_mean", self.room_count_mean, true),
            ("room_count_std", self.room_count_std, true),
            ("icon_count_mean", self.icon_count_mean, true),
            ("icon_count_std", self.icon_count_std, true),
            ("opening_count_mean", self.opening_count_mean, true),
            ("opening_count_std", self.opening_count_std, true),
            ("corner_count_mean", self.corner_count_mean, true),
            ("area_mean_m2", self.area_mean_m2, self.area_mean_m2 > 0.0),
            ("area_std_m2", self.area_std_m2, true),
            ("noise.heatmap_sigma", self.noise.heatmap_sigma, true),
            ("noise.dropout_prob", self.noise.dropout_prob, self.noise.dropout_prob <= 1.0),
            ("noise.jitter_px", self.noise.jitter_px, true),
        ];
        for (name, v, extra) in checks {
            if !v.is_finite() || v < 0.0 || !extra {
                return Err(SynthError::InvalidConfig(name));
            }
        }
        Ok(())
    }
}

fn sample_count(rng: &mut ChaCha8Rng, mean: f64, std: f64) -> usize {
    let v = Normal::new(mean, std).expect("validated").sample(rng);
    v.round().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Cell {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl Cell {
    fn area(&self) -> i64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn rect(&self) -> Rect {
        Rect::new(self.x0 as f64, self.y0 as f64, self.x1 as f64, self.y1 as f64)
    }
}

/// Recursive axis-aligned splitting: the largest splittable cell is cut along
/// its longer side at a random admissible line.
fn partition(rng: &mut ChaCha8Rng, outer: Cell, rooms: usize, min_side: i64) -> Vec<Cell> {
    let mut cells = vec![outer];
    let mut xlines = vec![outer.x0, outer.x1];
    let mut ylines = vec![outer.y0, outer.y1];
    while cells.len() < rooms {
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&i| (-cells[i].area(), i));
        let mut done = false;
        for i in order {
            let c = cells[i];
            let vertical_first = (c.x1 - c.x0) > (c.y1 - c.y0)
                || ((c.x1 - c.x0) == (c.y1 - c.y0) && rng.random_bool(0.5));
            for vertical in [vertical_first, !vertical_first] {
                let (lo, hi, lines) = if vertical {
                    (c.x0, c.x1, &xlines)
                } else {
                    (c.y0, c.y1, &ylines)
                };
                let options: Vec<i64> = (lo + min_side..=hi - min_side)
                    .filter(|p| lines.iter().all(|l| (p - l).abs() >= LINE_GAP_PX))
                    .collect();
                if options.is_empty() {
                    continue;
                }
                let p = options[rng.random_range(0..options.len())];
                if vertical {
                    xlines.push(p);
                    cells[i] = Cell { x1: p, ..c };
                    cells.push(Cell { x0: p, ..c });
                } else {
                    ylines.push(p);
                    cells[i] = Cell { y1: p, ..c };
                    cells.push(Cell { y0: p, ..c });
                }
                done = true;
                break;
            }
            if done {
                break;
            }
        }
        if !done {
            break;
        }
    }
    cells
}

type Key = (i64, i64);

/// Corners and walls of the union of cell outlines: every cell edge split at
/// the cell vertices lying on it.
fn walls_of(cells: &[Cell]) -> (Vec<Corner>, Vec<Wall>, Vec<(Key, Key)>) {
    let mut vertices: BTreeSet<Key> = BTreeSet::new();
    for c in cells {
        for v in [(c.x0, c.y0), (c.x1, c.y0), (c.x1, c.y1), (c.x0, c.y1)] {
            vertices.insert(v);
        }
    }
    let mut edges: BTreeSet<(Key, Key)> = BTreeSet::new();
    for c in cells {
        let sides = [
            ((c.x0, c.y0), (c.x1, c.y0)),
            ((c.x0, c.y1), (c.x1, c.y1)),
            ((c.x0, c.y0), (c.x0, c.y1)),
            ((c.x1, c.y0), (c.x1, c.y1)),
        ];
        for (a, b) in sides {
            let mut on: Vec<Key> = vertices
                .iter()
                .copied()
                .filter(|&(x, y)| {
                    if a.1 == b.1 {
                        y == a.1 && x >= a.0 && x <= b.0
                    } else {
                        x == a.0 && y >= a.1 && y <= b.1
                    }
                })
                .collect();
            on.sort_unstable();
            for w in on.windows(2) {
                edges.insert((w[0], w[1]));
            }
        }
    }
    let mut dirs: BTreeMap<Key, DirectionSet> = BTreeMap::new();
    for &(a, b) in &edges {
        let d = Direction::of_vector((b.0 - a.0) as f64, (b.1 - a.1) as f64).expect("axis edge");
        dirs.entry(a).or_default().insert(d);
        dirs.entry(b).or_default().insert(d.opposite());
    }
    let mut keys: Vec<Key> = dirs.keys().copied().collect();
    keys.sort_by_key(|&(x, y)| (y, x));
    let id: BTreeMap<Key, u32> = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
    let corners = keys
        .iter()
        .map(|&k| Corner {
            id: id[&k],
            position: Point::new(k.0 as f64, k.1 as f64),
            junction: JunctionType::from_directions(dirs[&k]).expect("rectangle corners"),
        })
        .collect();
    let edge_list: Vec<(Key, Key)> = edges.into_iter().collect();
    let walls = edge_list.iter().map(|(a, b)| Wall::new(id[a], id[b])).collect();
    (corners, walls, edge_list)
}

const ROOM_PRIOR: [(RoomKind, f64); 7] = [
    (RoomKind::Bedroom, 0.3),
    (RoomKind::Bathroom, 0.2),
    (RoomKind::Kitchen, 0.15),
    (RoomKind::Closet, 0.1),
    (RoomKind::Corridor, 0.1),
    (RoomKind::DiningRoom, 0.1),
    (RoomKind::Balcony, 0.05),
];

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[(T, f64)]) -> T {
    let total: f64 = items.iter().map(|i| i.1).sum();
    let mut u = rng.random::<f64>() * total;
    for &(t, w) in items {
        if u < w {
            return t;
        }
        u -= w;
    }
    items[items.len() - 1].0
}

fn icon_prior(room: RoomKind) -> &'static [(IconKind, f64)] {
    use IconKind::*;
    match room {
        RoomKind::LivingRoom => &[(Sofa, 0.4), (Table, 0.3), (Cabinet, 0.3)],
        RoomKind::Kitchen => &[(Counter, 0.35), (Refrigerator, 0.25), (Sink, 0.25), (Table, 0.15)],
        RoomKind::Bedroom => &[(Bed, 0.5), (Cabinet, 0.5)],
        RoomKind::Bathroom => &[(Toilet, 0.4), (Sink, 0.35), (Bathtub, 0.25)],
        RoomKind::Closet | RoomKind::Corridor => &[(Cabinet, 1.0)],
        RoomKind::Balcony => &[(Table, 1.0)],
        RoomKind::DiningRoom => &[(Table, 0.6), (Cabinet, 0.4)],
    }
}

/// Footprint in metres (long, short).
fn icon_size_m(kind: IconKind) -> (f64, f64) {
    match kind {
        IconKind::Counter => (2.0, 0.6),
        IconKind::Bathtub => (1.6, 0.75),
        IconKind::Toilet => (0.65, 0.5),
        IconKind::Sink => (0.6, 0.5),
        IconKind::Sofa => (2.0, 0.9),
        IconKind::Cabinet => (1.0, 0.5),
        IconKind::Bed => (2.0, 1.6),
        IconKind::Table => (1.2, 0.8),
        IconKind::Refrigerator => (0.7, 0.7),
    }
}

/// Opening end-points of one channel (the direction toward the other end).
fn ends(openings: &[Opening]) -> Vec<(Direction, Point)> {
    openings
        .iter()
        .flat_map(|o| {
            let [a, b] = o.endpoints;
            let d = Direction::of_vector(b.x - a.x, b.y - a.y).expect("opening has length");
            [(d, a), (d.opposite(), b)]
        })
        .collect()
}

fn try_opening(
    rng: &mut ChaCha8Rng,
    segment: (Key, Key),
    along: (i64, i64),
    length: i64,
    existing: &[Opening],
) -> Option<[Point; 2]> {
    let (lo, hi) = (along.0 + OPENING_MARGIN_PX, along.1 - OPENING_MARGIN_PX);
    let length = length.min(hi - lo);
    if length < 8 {
        return None;
    }
    let horizontal = segment.0 .1 == segment.1 .1;
    let taken = ends(existing);
    for _ in 0..20 {
        let s = rng.random_range(lo..=hi - length);
        let (a, b) = if horizontal {
            let y = segment.0 .1 as f64;
            (Point::new(s as f64, y), Point::new((s + length) as f64, y))
        } else {
            let x = segment.0 .0 as f64;
            (Point::new(x, s as f64), Point::new(x, (s + length) as f64))
        };
        let d = if horizontal { Direction::PosX } else { Direction::PosY };
        let clear = taken.iter().all(|&(e, p)| {
            (e != d || p.distance(a) >= DISK_GAP_PX) && (e != d.opposite() || p.distance(b) >= DISK_GAP_PX)
        }) && existing.iter().all(|o| {
            collinear_overlap((o.endpoints[0], o.endpoints[1]), (a, b), 0.0) == 0.0
                && o.endpoints.iter().all(|q| segment_distance(*q, a, b) >= OPENING_GAP_PX)
        });
        if clear {
            return Some([a, b]);
        }
    }
    None
}

fn icon_fits(rect: &Rect, placed: &[Icon]) -> bool {
    placed.iter().all(|other| {
        let o = other.rect;
        let apart = rect.xmin >= o.xmax + ICON_MARGIN_PX
            || o.xmin >= rect.xmax + ICON_MARGIN_PX
            || rect.ymin >= o.ymax + ICON_MARGIN_PX
            || o.ymin >= rect.ymax + ICON_MARGIN_PX;
        let coords_distinct = (rect.xmin - o.xmin).abs() > 3.0
            && (rect.xmax - o.xmax).abs() > 3.0
            && (rect.ymin - o.ymin).abs() > 3.0
            && (rect.ymax - o.ymax).abs() > 3.0;
        let corners_apart = rect
            .corners()
            .iter()
            .zip(o.corners())
            .all(|(p, q)| p.distance(q) >= DISK_GAP_PX);
        apart && coords_distinct && corners_apart
    })
}

/// A random Manhattan floorplan: a split rectangle with typed rooms, doors
/// along a spanning tree of shared walls, windows on exterior walls and
/// non-overlapping icons.
pub fn gen_floorplan(config: &SynthConfig) -> Result<Floorplan, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let area = Normal::new(config.area_mean_m2, config.area_std_m2)
        .expect("validated")
        .sample(&mut rng)
        .max(MIN_AREA_M2.min(config.area_mean_m2));
    let aspect = rng.random_range(0.55..=1.0);
    let long_m = (area / aspect).sqrt();
    let scale = long_m / FOOTPRINT_PX as f64;
    let short_px = (FOOTPRINT_PX as f64 * aspect).round() as i64;
    let lead = (256 - short_px) / 2;
    let outer = if rng.random_bool(0.5) {
        Cell { x0: FOOTPRINT_OFFSET, y0: lead, x1: FOOTPRINT_OFFSET + FOOTPRINT_PX, y1: lead + short_px }
    } else {
        Cell { x0: lead, y0: FOOTPRINT_OFFSET, x1: lead + short_px, y1: FOOTPRINT_OFFSET + FOOTPRINT_PX }
    };
    let min_side = ((MIN_ROOM_SIDE_M / scale).ceil() as i64).max(MIN_ROOM_SIDE_PX);
    let n_rooms = sample_count(&mut rng, config.room_count_mean, config.room_count_std).max(1);
    let n_openings = sample_count(&mut rng, config.opening_count_mean, config.opening_count_std);
    let n_icons = sample_count(&mut rng, config.icon_count_mean, config.icon_count_std);

    let cells = partition(&mut rng, outer, n_rooms, min_side);
    let (corners, walls, edges) = walls_of(&cells);

    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (-cells[i].area(), i));
    let mut kinds = vec![RoomKind::LivingRoom; cells.len()];
    for &i in order.iter().skip(1) {
        kinds[i] = pick(&mut rng, &ROOM_PRIOR);
    }
    let rooms: Vec<Room> = cells
        .iter()
        .zip(&kinds)
        .map(|(c, &kind)| Room {
            kind,
            boundary: c.rect().to_polygon(),
        })
        .collect();

    // Shared wall pieces between cell pairs: (i, j, wall index).
    let mut shared = Vec::new();
    let mut exterior = Vec::new();
    for (w, &(a, b)) in edges.iter().enumerate() {
        let touches = |c: &Cell| {
            if a.1 == b.1 {
                (a.1 == c.y0 || a.1 == c.y1) && a.0 >= c.x0 && b.0 <= c.x1
            } else {
                (a.0 == c.x0 || a.0 == c.x1) && a.1 >= c.y0 && b.1 <= c.y1
            }
        };
        let owners: Vec<usize> = (0..cells.len()).filter(|&i| touches(&cells[i])).collect();
        match owners.as_slice() {
            [i, j] => shared.push((*i, *j, w)),
            [_] => exterior.push(w),
            _ => {}
        }
    }
    shared.shuffle(&mut rng);
    let along = |w: usize| {
        let (a, b) = edges[w];
        if a.1 == b.1 {
            (a.0, b.0)
        } else {
            (a.1, b.1)
        }
    };

    let mut openings: Vec<Opening> = Vec::new();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let door_px = (DOOR_M / scale).round() as i64;
    for &(i, j, w) in &shared {
        let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
        if ri == rj {
            continue;
        }
        if let Some(endpoints) = try_opening(&mut rng, edges[w], along(w), door_px, &openings) {
            parent[ri] = rj;
            openings.push(Opening {
                kind: OpeningKind::Door,
                endpoints,
                host_wall: w,
            });
        }
    }
    let window_px = (WINDOW_M / scale).round() as i64;
    let windows = n_openings.saturating_sub(openings.len());
    let mut attempts = 0;
    let mut placed = 0;
    while placed < windows && attempts < 10 * windows && !exterior.is_empty() {
        attempts += 1;
        let w = exterior[rng.random_range(0..exterior.len())];
        if let Some(endpoints) = try_opening(&mut rng, edges[w], along(w), window_px, &openings) {
            openings.push(Opening {
                kind: OpeningKind::Window,
                endpoints,
                host_wall: w,
            });
            placed += 1;
        }
    }

    let mut icons: Vec<Icon> = Vec::new();
    let mut attempts = 0;
    while icons.len() < n_icons && attempts < 50 * n_icons {
        attempts += 1;
        let r = rng.random_range(0..cells.len());
        let kind = pick(&mut rng, icon_prior(kinds[r]));
        let (long, short) = icon_size_m(kind);
        let (mut w, mut h) = (
            ((long / scale).round()).max(8.0),
            ((short / scale).round()).max(8.0),
        );
        if rng.random_bool(0.5) {
            std::mem::swap(&mut w, &mut h);
        }
        let c = cells[r];
        let (x_lo, x_hi) = (c.x0 as f64 + ICON_MARGIN_PX, c.x1 as f64 - ICON_MARGIN_PX - w);
        let (y_lo, y_hi) = (c.y0 as f64 + ICON_MARGIN_PX, c.y1 as f64 - ICON_MARGIN_PX - h);
        if x_lo > x_hi || y_lo > y_hi {
            continue;
        }
        let x = rng.random_range(x_lo as i64..=x_hi as i64) as f64;
        let y = rng.random_range(y_lo as i64..=y_hi as i64) as f64;
        let rect = Rect::new(x, y, x + w, y + h);
        if icon_fits(&rect, &icons) {
            icons.push(Icon { kind, rect });
        }
    }

    Ok(Floorplan {
        corners,
        walls,
        openings,
        icons,
        rooms,
        domain: Some(FloorplanDomain::new([0.0, 0.0], scale)),
        ..Floorplan::empty()
    })
}

/// Room adjacency graph through doors, derived from the generated geometry.
pub fn door_components(plan: &Floorplan) -> usize {
    let adj = crate::evaluate::door_graph(plan);
    let mut seen = vec![false; adj.len()];
    let mut components = 0;
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    components
}
