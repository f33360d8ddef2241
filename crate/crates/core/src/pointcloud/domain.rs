use serde::{Deserialize, Serialize};

use super::{PointCloud, PointCloudError};
use crate::geometry::Point;
use crate::model::RESOLUTION;
use crate::raster::Raster;

const OUTLIER_FRACTION: f64 = 0.025;
const EXPANSION: f64 = 0.05;

/// Affine map between world XY (metres) and the square grid.
///
/// `origin` is the world position of the outer corner of pixel (0, 0); pixel
/// `(row, col)` covers `[origin + col·scale, origin + (col+1)·scale)` in X and
/// likewise in Y. Continuous grid coordinates put pixel centres at integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorplanDomain {
    pub origin: [f64; 2],
    pub scale: f64,
    pub resolution: u32,
}

impl FloorplanDomain {
    pub fn new(origin: [f64; 2], scale: f64) -> Self {
        Self {
            origin,
            scale,
            resolution: RESOLUTION,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.scale > 0.0
            && self.scale.is_finite()
            && self.origin.iter().all(|v| v.is_finite())
            && self.resolution > 0
    }

    /// Metres per cell when the same square is rasterized at `resolution`.
    pub fn cell_size(&self, resolution: u32) -> f64 {
        self.scale * self.resolution as f64 / resolution as f64
    }

    pub fn world_to_grid(&self, x: f64, y: f64) -> Point {
        Point::new(
            (x - self.origin[0]) / self.scale - 0.5,
            (y - self.origin[1]) / self.scale - 0.5,
        )
    }

    pub fn grid_to_world(&self, p: Point) -> [f64; 2] {
        [
            self.origin[0] + (p.x + 0.5) * self.scale,
            self.origin[1] + (p.y + 0.5) * self.scale,
        ]
    }

    /// `(row, col)` of the cell holding world XY at the given resolution, or
    /// `None` when it falls outside the square.
    pub fn cell_at(&self, x: f64, y: f64, resolution: u32) -> Option<(usize, usize)> {
        let size = self.cell_size(resolution);
        let col = ((x - self.origin[0]) / size).floor();
        let row = ((y - self.origin[1]) / size).floor();
        let r = resolution as f64;
        if col >= 0.0 && col < r && row >= 0.0 && row < r {
            Some((row as usize, col as usize))
        } else {
            None
        }
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        self.cell_at(x, y, self.resolution)
    }
}

/// Nearest-rank percentile of sorted values: `v[ceil(p·n) − 1]`, clamped.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

fn trimmed_range(mut v: Vec<f64>) -> (f64, f64) {
    v.sort_by(f64::total_cmp);
    (
        nearest_rank(&v, OUTLIER_FRACTION),
        nearest_rank(&v, 1.0 - OUTLIER_FRACTION),
    )
}

/// Square domain framing the cloud's XY footprint: outliers trimmed per axis,
/// each side expanded by 5%, longer side spanning the full grid and the
/// rectangle centred.
pub fn compute_domain(cloud: &PointCloud) -> Result<FloorplanDomain, PointCloudError> {
    if cloud.is_empty() {
        return Err(PointCloudError::Empty);
    }
    cloud.check_finite()?;
    let (x0, x1) = trimmed_range(cloud.positions().iter().map(|p| p[0]).collect());
    let (y0, y1) = trimmed_range(cloud.positions().iter().map(|p| p[1]).collect());
    let (lx, ly) = (x1 - x0, y1 - y0);
    let (x0, x1) = (x0 - EXPANSION * lx, x1 + EXPANSION * lx);
    let (y0, y1) = (y0 - EXPANSION * ly, y1 + EXPANSION * ly);
    let side = (x1 - x0).max(y1 - y0);
    if side <= 0.0 {
        return Err(PointCloudError::Degenerate);
    }
    let res = RESOLUTION as f64;
    let scale = side / res;
    let half = 0.5 * res * scale;
    Ok(FloorplanDomain::new(
        [0.5 * (x0 + x1) - half, 0.5 * (y0 + y1) - half],
        scale,
    ))
}

/// Top-down point counts per cell. Points outside the square are dropped.
pub fn density_image(cloud: &PointCloud, domain: &FloorplanDomain) -> Raster {
    let res = domain.resolution as usize;
    let mut counts = vec![0u32; res * res];
    for p in cloud.positions() {
        if let Some((r, c)) = domain.cell_of(p[0], p[1]) {
            counts[r * res + c] += 1;
        }
    }
    Raster::from_vec(res, counts.into_iter().map(|c| c as f32).collect())
}
