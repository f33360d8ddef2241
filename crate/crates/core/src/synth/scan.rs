use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::geometry::{point_in_polygon, polygon_area, Point};
use crate::model::{Floorplan, IconKind};
use crate::pointcloud::{FloorplanDomain, PointCloud};

pub const WALL_HEIGHT_M: f64 = 2.5;
pub const POSITION_SIGMA_M: f64 = 0.01;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScanError {
    #[error("plan has no walls to scan")]
    NoWalls,
    #[error("plan has no domain, so its physical scale is unknown")]
    NoDomain,
    #[error("density must be finite and non-negative, got {0}")]
    BadDensity(f64),
}

fn icon_height_m(kind: IconKind) -> f64 {
    match kind {
        IconKind::Counter => 0.9,
        IconKind::Bathtub => 0.55,
        IconKind::Toilet => 0.75,
        IconKind::Sink => 0.85,
        IconKind::Sofa => 0.8,
        IconKind::Cabinet => 1.8,
        IconKind::Bed => 0.55,
        IconKind::Table => 0.75,
        IconKind::Refrigerator => 1.8,
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    density: f64,
    domain: FloorplanDomain,
    points: Vec<[f64; 3]>,
}

impl Sampler {
    fn count(&mut self, area_m2: f64) -> usize {
        let lambda = self.density * area_m2;
        if lambda <= 0.0 {
            return 0;
        }
        Poisson::new(lambda).expect("positive rate").sample(&mut self.rng) as usize
    }

    fn push(&mut self, grid: Point, z: f64) {
        let [x, y] = self.domain.grid_to_world(grid);
        let n = self.noise;
        let p = [
            x + n.sample(&mut self.rng),
            y + n.sample(&mut self.rng),
            z + n.sample(&mut self.rng),
        ];
        self.points.push(p);
    }

    /// Vertical rectangle over grid segment `a`–`b` from `z0` to `z1` metres.
    fn vertical(&mut self, a: Point, b: Point, z0: f64, z1: f64) {
        let len = a.distance(b) * self.domain.scale;
        for _ in 0..self.count(len * (z1 - z0)) {
            let t = self.rng.random::<f64>();
            let z = self.rng.random_range(z0..=z1);
            self.push(a.lerp(b, t), z);
        }
    }

    /// Horizontal region at height `z` given by a grid polygon.
    fn horizontal(&mut self, poly: &[Point], z: f64) {
        let s = self.domain.scale;
        let n = self.count(polygon_area(poly) * s * s);
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in poly {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let mut got = 0;
        while got < n {
            let p = Point::new(self.rng.random_range(x0..=x1), self.rng.random_range(y0..=y1));
            if point_in_polygon(p, poly) {
                self.push(p, z);
                got += 1;
            }
        }
    }
}

/// Simulated scan: wall faces up to 2.5 m, the floor of every room and the
/// visible faces of icon boxes, sampled at `density_per_m2` with 1 cm noise.
pub fn sample_scan(plan: &Floorplan, density_per_m2: f64, seed: u64) -> Result<PointCloud, ScanError> {
    let domain = plan.domain.ok_or(ScanError::NoDomain)?;
    if !density_per_m2.is_finite() || density_per_m2 < 0.0 {
        return Err(ScanError::BadDensity(density_per_m2));
    }
    let segments = plan.wall_segments();
    if segments.is_empty() {
        return Err(ScanError::NoWalls);
    }
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(seed),
        noise: Normal::new(0.0, POSITION_SIGMA_M).expect("positive sigma"),
        density: density_per_m2,
        domain,
        points: Vec::new(),
    };
    for (a, b) in segments {
        s.vertical(a, b, 0.0, WALL_HEIGHT_M);
    }
    for room in &plan.rooms {
        s.horizontal(&room.boundary, 0.0);
    }
    for icon in &plan.icons {
        let h = icon_height_m(icon.kind);
        let c = icon.rect.corners();
        s.horizontal(&icon.rect.to_polygon(), h);
        for i in 0..4 {
            s.vertical(c[i], c[(i + 1) % 4], 0.0, h);
        }
    }
    Ok(PointCloud::new(s.points))
}
