//! Candidate selection by integer programming and assembly of the final plan.

mod ip;
mod rooms;
mod solve;

pub use ip::{build_ip, Constraint, IpModel, Sense, Variable, CORNER_EXCLUSION_RADIUS, ICON_EXCLUSION_IOU};
pub use rooms::assemble_rooms;
pub use solve::{solve_ip, solve_ip_with_limit, Solution, SolveError, NODE_LIMIT};

use crate::extract::{extract_candidates, CandidateSet, ExtractError};
use crate::geometry::{point_in_polygon, Point};
use crate::heatmap::HeatmapStack;
use crate::model::{
    validate, Corner, Direction, DirectionSet, Floorplan, Icon, JunctionType, Opening, OpeningKind, Room,
    Violation, Wall,
};

/// Perpendicular probe distance used to tell doors (rooms on both sides)
/// from windows.
pub const DOOR_PROBE_PX: f64 = 2.0;

#[derive(Debug, thiserror::Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("assembled floorplan is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub plan: Floorplan,
    pub candidates: CandidateSet,
    pub model: IpModel,
    pub solution: Solution,
}

fn find(p: &mut [usize], mut i: usize) -> usize {
    while p[i] != i {
        p[i] = p[p[i]];
        i = p[i];
    }
    i
}

/// Cluster means of one coordinate over corners joined by walls along the
/// other axis.
fn snap_axis(values: &[f64], links: &[(usize, usize)]) -> Vec<f64> {
    let mut parent: Vec<usize> = (0..values.len()).collect();
    for &(a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut sum = vec![0.0; values.len()];
    let mut count = vec![0usize; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let r = find(&mut parent, i);
        sum[r] += v;
        count[r] += 1;
    }
    (0..values.len())
        .map(|i| {
            let r = find(&mut parent, i);
            sum[r] / count[r] as f64
        })
        .collect()
}

fn inside_any(rooms: &[Room], p: Point) -> bool {
    rooms.iter().any(|r| point_in_polygon(p, &r.boundary))
}

pub fn reconstruct(stack: &HeatmapStack) -> Result<Reconstruction, ReconstructError> {
    let candidates = extract_candidates(stack)?;
    let model = build_ip(&candidates);
    let solution = solve_ip(&model)?;
    let on = &solution.assignment;
    let nc = candidates.corners.len();
    let nw = candidates.walls.len();
    let no = candidates.openings.len();
    let wall_on = |k: usize| on[nc + k];

    let corners: Vec<usize> = (0..nc).filter(|&i| on[i]).collect();
    let mut slot = vec![usize::MAX; nc];
    for (s, &i) in corners.iter().enumerate() {
        slot[i] = s;
    }
    let mut horizontal_links = Vec::new();
    let mut vertical_links = Vec::new();
    for (k, w) in candidates.walls.iter().enumerate() {
        if wall_on(k) {
            let link = (slot[w.a], slot[w.b]);
            if w.horizontal {
                horizontal_links.push(link);
            } else {
                vertical_links.push(link);
            }
        }
    }
    let xs: Vec<f64> = corners.iter().map(|&i| candidates.corners[i].position.x).collect();
    let ys: Vec<f64> = corners.iter().map(|&i| candidates.corners[i].position.y).collect();
    let xs = snap_axis(&xs, &vertical_links);
    let ys = snap_axis(&ys, &horizontal_links);
    let pos: Vec<Point> = xs.iter().zip(&ys).map(|(&x, &y)| Point::new(x, y)).collect();

    // (candidate wall index, corner slots)
    let mut walls: Vec<(usize, usize, usize)> = (0..nw)
        .filter(|&k| wall_on(k))
        .map(|k| (k, slot[candidates.walls[k].a], slot[candidates.walls[k].b]))
        .filter(|&(_, a, b)| pos[a] != pos[b])
        .collect();
    let mut junctions: Vec<Option<JunctionType>>;
    loop {
        let mut sets = vec![DirectionSet::EMPTY; pos.len()];
        let mut degree = vec![0usize; pos.len()];
        for &(_, a, b) in &walls {
            let d = Direction::of_vector(pos[b].x - pos[a].x, pos[b].y - pos[a].y).expect("non-degenerate");
            sets[a].insert(d);
            sets[b].insert(d.opposite());
            degree[a] += 1;
            degree[b] += 1;
        }
        junctions = (0..pos.len())
            .map(|i| {
                if sets[i].len() == degree[i] {
                    JunctionType::from_directions(sets[i])
                } else {
                    None
                }
            })
            .collect();
        let before = walls.len();
        walls.retain(|&(_, a, b)| junctions[a].is_some() && junctions[b].is_some());
        if walls.len() == before {
            break;
        }
    }

    let mut id_of = vec![u32::MAX; pos.len()];
    let mut plan = Floorplan {
        resolution: stack.resolution() as u32,
        ..Floorplan::empty()
    };
    for (s, j) in junctions.iter().enumerate() {
        if let Some(junction) = *j {
            id_of[s] = plan.corners.len() as u32;
            plan.corners.push(Corner {
                id: id_of[s],
                position: pos[s],
                junction,
            });
        }
    }
    let mut wall_index = vec![usize::MAX; nw];
    for &(k, a, b) in &walls {
        wall_index[k] = plan.walls.len();
        plan.walls.push(Wall::new(id_of[a], id_of[b]));
    }

    let segments = plan.wall_segments();
    plan.rooms = assemble_rooms(&segments, stack);

    for (k, o) in candidates.openings.iter().enumerate() {
        if !on[nc + nw + k] {
            continue;
        }
        let Some(host) = o.hosts.iter().map(|&h| wall_index[h]).find(|&h| h != usize::MAX) else {
            continue;
        };
        let (a, b) = segments[host];
        let horizontal = a.y == b.y;
        let project = |p: Point| {
            if horizontal {
                Point::new(p.x.clamp(a.x.min(b.x), a.x.max(b.x)), a.y)
            } else {
                Point::new(a.x, p.y.clamp(a.y.min(b.y), a.y.max(b.y)))
            }
        };
        let endpoints = o.endpoints.map(project);
        if endpoints[0] == endpoints[1] {
            continue;
        }
        let m = endpoints[0].lerp(endpoints[1], 0.5);
        let (dx, dy) = if horizontal { (0.0, DOOR_PROBE_PX) } else { (DOOR_PROBE_PX, 0.0) };
        let door = inside_any(&plan.rooms, Point::new(m.x - dx, m.y - dy))
            && inside_any(&plan.rooms, Point::new(m.x + dx, m.y + dy));
        plan.openings.push(Opening {
            kind: if door { OpeningKind::Door } else { OpeningKind::Window },
            endpoints,
            host_wall: host,
        });
    }

    for (k, c) in candidates.icons.iter().enumerate() {
        if on[nc + nw + no + k] {
            plan.icons.push(Icon {
                kind: c.kind,
                rect: c.rect,
            });
        }
    }

    let violations = validate(&plan);
    if !violations.is_empty() {
        return Err(ReconstructError::Invalid(violations));
    }
    Ok(Reconstruction {
        plan,
        candidates,
        model,
        solution,
    })
}

/// Heatmap stack to vector floorplan: candidate extraction, exact selection,
/// then corner snapping, room faces and opening/icon attachment.
pub fn reconstruct_floorplan(stack: &HeatmapStack) -> Result<Floorplan, ReconstructError> {
    Ok(reconstruct(stack)?.plan)
}
