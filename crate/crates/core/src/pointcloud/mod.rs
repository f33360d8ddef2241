//! Point clouds: loading, normalization, subsampling, augmentation, and the
//! top-down floorplan domain with its point-density image.

mod augment;
mod domain;
mod io;

pub use augment::{augment, augment_with, Similarity};
pub use domain::{compute_domain, density_image, nearest_rank, FloorplanDomain};
pub use io::{parse_cloud, read_cloud, write_ply, CloudParseError};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default PointNet-branch subsample size.
pub const DEFAULT_SUBSAMPLE: usize = 50_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PointCloudError {
    #[error("point cloud is empty")]
    Empty,
    #[error("subsample size must be at least 1")]
    ZeroSubsample,
    #[error("point cloud is degenerate: all points coincide in XY")]
    Degenerate,
    #[error("feature matrix has {got} values, expected {expected}")]
    FeatureShape { expected: usize, got: usize },
    #[error("color list has {got} entries for {points} points")]
    ColorShape { points: usize, got: usize },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
}

/// Per-point feature vectors of a shared width, row-major (`n × channels`).
#[derive(Clone, Debug, PartialEq)]
pub struct Features {
    channels: usize,
    data: Vec<f64>,
}

impl Features {
    pub fn new(channels: usize, data: Vec<f64>) -> Result<Self, PointCloudError> {
        if channels == 0 {
            if !data.is_empty() {
                return Err(PointCloudError::FeatureShape {
                    expected: 0,
                    got: data.len(),
                });
            }
        } else if !data.len().is_multiple_of(channels) {
            return Err(PointCloudError::FeatureShape {
                expected: data.len().div_ceil(channels) * channels,
                got: data.len(),
            });
        }
        Ok(Self { channels, data })
    }

    pub fn zeros(points: usize, channels: usize) -> Self {
        Self {
            channels,
            data: vec![0.0; points * channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.channels).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.channels..(i + 1) * self.channels]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.channels..(i + 1) * self.channels]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, other: &Features) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    positions: Vec<[f64; 3]>,
    colors: Option<Vec<[u8; 3]>>,
    features: Option<Features>,
}

impl PointCloud {
    pub fn new(positions: Vec<[f64; 3]>) -> Self {
        Self {
            positions,
            colors: None,
            features: None,
        }
    }

    pub fn with_colors(mut self, colors: Vec<[u8; 3]>) -> Result<Self, PointCloudError> {
        if colors.len() != self.positions.len() {
            return Err(PointCloudError::ColorShape {
                points: self.positions.len(),
                got: colors.len(),
            });
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn with_features(mut self, features: Features) -> Result<Self, PointCloudError> {
        let expected = self.positions.len() * features.channels;
        if features.data.len() != expected {
            return Err(PointCloudError::FeatureShape {
                expected,
                got: features.data.len(),
            });
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn colors(&self) -> Option<&[[u8; 3]]> {
        self.colors.as_deref()
    }

    pub fn features(&self) -> Option<&Features> {
        self.features.as_ref()
    }

    pub fn check_finite(&self) -> Result<(), PointCloudError> {
        match self
            .positions
            .iter()
            .position(|p| p.iter().any(|v| !v.is_finite()))
        {
            Some(i) => Err(PointCloudError::NonFinite(i)),
            None => Ok(()),
        }
    }

    pub fn centroid(&self) -> Option<[f64; 3]> {
        if self.is_empty() {
            return None;
        }
        let n = self.len() as f64;
        let mut c = [0.0; 3];
        for p in &self.positions {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        Some(c.map(|v| v / n))
    }

    /// Keeps the points at `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            colors: self
                .colors
                .as_ref()
                .map(|c| indices.iter().map(|&i| c[i]).collect()),
            features: self.features.as_ref().map(|f| Features {
                channels: f.channels,
                data: indices
                    .iter()
                    .flat_map(|&i| f.row(i).iter().copied())
                    .collect(),
            }),
        }
    }

    pub fn map_positions(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> PointCloud {
        PointCloud {
            positions: self.positions.iter().map(|&p| f(p)).collect(),
            colors: self.colors.clone(),
            features: self.features.clone(),
        }
    }

    pub fn extend(&mut self, other: PointCloud) -> Result<(), PointCloudError> {
        let n = self.len();
        self.positions.extend(other.positions);
        self.colors = match (self.colors.take(), other.colors) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            (None, None) => None,
            (a, b) if n == 0 => b.or(a),
            _ => None,
        };
        self.features = match (self.features.take(), other.features) {
            (Some(mut a), Some(b)) if a.channels == b.channels => {
                a.data.extend(b.data);
                Some(a)
            }
            (None, b) if n == 0 => b,
            (None, None) => None,
            (Some(a), b) => {
                return Err(PointCloudError::FeatureShape {
                    expected: a.channels,
                    got: b.map_or(0, |b| b.channels),
                })
            }
            (None, Some(b)) => {
                return Err(PointCloudError::FeatureShape {
                    expected: 0,
                    got: b.channels,
                })
            }
        };
        Ok(())
    }
}

/// Translates the cloud so its centre of mass sits at the origin.
pub fn normalize(cloud: &PointCloud) -> Result<PointCloud, PointCloudError> {
    let c = cloud.centroid().ok_or(PointCloudError::Empty)?;
    Ok(cloud.map_positions(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]]))
}

/// Uniform sample of `k` points without replacement; the input order of the
/// kept points is preserved.
pub fn subsample(cloud: &PointCloud, k: usize, seed: u64) -> Result<PointCloud, PointCloudError> {
    if k == 0 {
        return Err(PointCloudError::ZeroSubsample);
    }
    if cloud.len() <= k {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, cloud.len(), k).into_vec();
    idx.sort_unstable();
    Ok(cloud.select(&idx))
}
