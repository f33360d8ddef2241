//! Square single- and multi-channel f32 rasters, row-major, indexed by
//! `(row, col)`, plus the pixel footprints of disks and line strips. Pixel
//! centres sit at integer grid coordinates.

use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    resolution: usize,
    data: Vec<f32>,
}

impl Raster {
    pub fn zeros(resolution: usize) -> Self {
        Self {
            resolution,
            data: vec![0.0; resolution * resolution],
        }
    }

    pub fn from_vec(resolution: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), resolution * resolution, "raster size mismatch");
        Self { resolution, data }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.resolution + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f32) {
        self.data[row * self.resolution + col] = v;
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }
}

/// Named stack of `K` square planes stored plane-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStack {
    resolution: usize,
    names: Vec<String>,
    data: Vec<f32>,
}

impl ChannelStack {
    pub fn zeros(resolution: usize, names: Vec<String>) -> Self {
        let len = resolution * resolution * names.len();
        Self {
            resolution,
            names,
            data: vec![0.0; len],
        }
    }

    pub fn from_parts(resolution: usize, names: Vec<String>, data: Vec<f32>) -> Self {
        assert_eq!(
            data.len(),
            resolution * resolution * names.len(),
            "stack size mismatch"
        );
        Self {
            resolution,
            names,
            data,
        }
    }

    pub fn from_raster(name: &str, raster: Raster) -> Self {
        Self {
            resolution: raster.resolution,
            names: vec![name.to_string()],
            data: raster.data,
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn channels(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn plane_len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn plane(&self, k: usize) -> &[f32] {
        let n = self.plane_len();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn plane_mut(&mut self, k: usize) -> &mut [f32] {
        let n = self.plane_len();
        &mut self.data[k * n..(k + 1) * n]
    }

    pub fn get(&self, k: usize, row: usize, col: usize) -> f32 {
        self.data[k * self.plane_len() + row * self.resolution + col]
    }

    pub fn set(&mut self, k: usize, row: usize, col: usize, v: f32) {
        let n = self.plane_len();
        self.data[k * n + row * self.resolution + col] = v;
    }

    pub fn raster(&self, k: usize) -> Raster {
        Raster::from_vec(self.resolution, self.plane(k).to_vec())
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn same_shape(&self, other: &ChannelStack) -> bool {
        self.resolution == other.resolution && self.channels() == other.channels()
    }
}

/// Pixels whose centre lies within `radius` of `centre`, clipped to the grid.
pub fn disk_pixels(centre: Point, radius: f64, resolution: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if !(centre.x.is_finite() && centre.y.is_finite()) {
        return out;
    }
    let max = resolution as f64 - 1.0;
    let r0 = (centre.y - radius).ceil().max(0.0);
    let r1 = (centre.y + radius).floor().min(max);
    let c0 = (centre.x - radius).ceil().max(0.0);
    let c1 = (centre.x + radius).floor().min(max);
    if r0 > r1 || c0 > c1 {
        return out;
    }
    for r in r0 as usize..=r1 as usize {
        for c in c0 as usize..=c1 as usize {
            let (dx, dy) = (c as f64 - centre.x, r as f64 - centre.y);
            if dx * dx + dy * dy <= radius * radius {
                out.push((r, c));
            }
        }
    }
    out
}

/// Pixels of an axis-aligned segment thickened to `width` (odd) pixels. The
/// dominant axis decides the orientation; the off-axis coordinate is the
/// rounded midpoint. Clipped to the grid.
pub fn strip_pixels(a: Point, b: Point, width: usize, resolution: usize) -> Vec<(usize, usize)> {
    let half = (width.saturating_sub(1) / 2) as i64;
    let horizontal = (b.x - a.x).abs() >= (b.y - a.y).abs();
    let (lo, hi, off) = if horizontal {
        (a.x.min(b.x), a.x.max(b.x), 0.5 * (a.y + b.y))
    } else {
        (a.y.min(b.y), a.y.max(b.y), 0.5 * (a.x + b.x))
    };
    let (lo, hi, off) = (lo.round() as i64, hi.round() as i64, off.round() as i64);
    let n = resolution as i64;
    let mut out = Vec::new();
    for along in lo.max(0)..=hi.min(n - 1) {
        for across in (off - half).max(0)..=(off + half).min(n - 1) {
            let (r, c) = if horizontal {
                (across, along)
            } else {
                (along, across)
            };
            out.push((r as usize, c as usize));
        }
    }
    out
}
