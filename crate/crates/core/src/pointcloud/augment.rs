use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FloorplanDomain, PointCloud};
use crate::geometry::{Point, Rect};
use crate::model::Floorplan;

pub const SCALE_RANGE: (f64, f64) = (0.5, 1.5);

/// Uniform scale about the world origin followed by a counter-clockwise
/// rotation about Z by a multiple of 90°.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub quarter_turns: u8,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        scale: 1.0,
        quarter_turns: 0,
    };

    pub fn sample(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Similarity {
            scale: rng.random_range(SCALE_RANGE.0..=SCALE_RANGE.1),
            quarter_turns: rng.random_range(0..4u8),
        }
    }

    fn rotate_xy(&self, x: f64, y: f64) -> (f64, f64) {
        match self.quarter_turns % 4 {
            0 => (x, y),
            1 => (-y, x),
            2 => (-x, -y),
            _ => (y, -x),
        }
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let (x, y) = self.rotate_xy(p[0], p[1]);
        [self.scale * x, self.scale * y, self.scale * p[2]]
    }

    /// The domain framing the transformed square: same grid, scale times
    /// larger cells, origin at the new minimum corner.
    pub fn apply_domain(&self, d: &FloorplanDomain) -> FloorplanDomain {
        let side = d.scale * d.resolution as f64;
        let corners = [
            (d.origin[0], d.origin[1]),
            (d.origin[0] + side, d.origin[1]),
            (d.origin[0], d.origin[1] + side),
            (d.origin[0] + side, d.origin[1] + side),
        ];
        let mut min = [f64::INFINITY; 2];
        for (x, y) in corners {
            let (rx, ry) = self.rotate_xy(x, y);
            min[0] = min[0].min(self.scale * rx);
            min[1] = min[1].min(self.scale * ry);
        }
        FloorplanDomain {
            origin: min,
            scale: d.scale * self.scale,
            resolution: d.resolution,
        }
    }

    /// The rotation expressed in continuous grid coordinates: a turn of the
    /// image about its centre. Scale leaves grid coordinates unchanged.
    pub fn apply_grid(&self, p: Point, resolution: u32) -> Point {
        let m = resolution as f64 - 1.0;
        match self.quarter_turns % 4 {
            0 => p,
            1 => Point::new(m - p.y, p.x),
            2 => Point::new(m - p.x, m - p.y),
            _ => Point::new(p.y, m - p.x),
        }
    }
}

fn transform_plan(plan: &Floorplan, t: &Similarity) -> Floorplan {
    let res = plan.resolution;
    let g = |p: Point| t.apply_grid(p, res);
    let mut out = plan.clone();
    for c in &mut out.corners {
        c.position = g(c.position);
        c.junction = c.junction.rotate(t.quarter_turns);
    }
    for o in &mut out.openings {
        o.endpoints = o.endpoints.map(g);
    }
    for icon in &mut out.icons {
        let r = icon.rect;
        icon.rect = Rect::from_corners(
            g(Point::new(r.xmin, r.ymin)),
            g(Point::new(r.xmax, r.ymax)),
        );
    }
    for room in &mut out.rooms {
        for v in &mut room.boundary {
            *v = g(*v);
        }
    }
    out.domain = plan.domain.map(|d| t.apply_domain(&d));
    out
}

/// Applies one explicit similarity to both the cloud and the annotation.
pub fn augment_with(
    cloud: &PointCloud,
    plan: &Floorplan,
    t: Similarity,
) -> (PointCloud, Floorplan) {
    (cloud.map_positions(|p| t.apply(p)), transform_plan(plan, &t))
}

/// Random scale in [0.5, 1.5] and rotation in {0°, 90°, 180°, 270°}, drawn
/// once per seed and applied identically to cloud and plan.
pub fn augment(cloud: &PointCloud, plan: &Floorplan, seed: u64) -> (PointCloud, Floorplan) {
    augment_with(cloud, plan, Similarity::sample(seed))
}
