//! Feature sharing between point, top-down grid and image domains: sum
//! pooling of point features into grid cells, its adjoint unpooling, and
//! unprojection of per-pixel image features through depth and pose.

use std::fs;
use std::path::{Path, PathBuf};

use crate::pointcloud::{Features, FloorplanDomain, PointCloud, PointCloudError};

pub const DEFAULT_FRAME_STRIDE: usize = 10;

const RIGID_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FeatureError {
    #[error("point cloud carries no feature vectors")]
    MissingFeatures,
    #[error("feature width {got} does not match {expected}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("camera pose is not a proper rigid transform")]
    NonRigidPose,
    #[error("intrinsics must have fx, fy > 0")]
    BadIntrinsics,
    #[error("frame stride must be at least 1")]
    ZeroStride,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Cloud(#[from] PointCloudError),
}

/// `H × W × C` grid of reals, row-major with channels innermost.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureGrid {
    resolution: usize,
    channels: usize,
    data: Vec<f64>,
}

impl FeatureGrid {
    pub fn zeros(resolution: usize, channels: usize) -> Self {
        Self {
            resolution,
            channels,
            data: vec![0.0; resolution * resolution * channels],
        }
    }

    pub fn from_vec(resolution: usize, channels: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), resolution * resolution * channels);
        Self {
            resolution,
            channels,
            data,
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn cell(&self, row: usize, col: usize) -> &[f64] {
        let i = (row * self.resolution + col) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn cell_mut(&mut self, row: usize, col: usize) -> &mut [f64] {
        let i = (row * self.resolution + col) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, other: &FeatureGrid) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn channel_total(&self, k: usize) -> f64 {
        self.data.iter().skip(k).step_by(self.channels.max(1)).sum()
    }
}

/// Sums the feature vectors of all points binned into each cell. Points are
/// visited in index order, so results are bit-reproducible.
pub fn pool_points_to_grid(
    cloud: &PointCloud,
    domain: &FloorplanDomain,
    resolution: u32,
) -> Result<FeatureGrid, FeatureError> {
    let f = cloud.features().ok_or(FeatureError::MissingFeatures)?;
    let mut grid = FeatureGrid::zeros(resolution as usize, f.channels());
    for (i, p) in cloud.positions().iter().enumerate() {
        if let Some((r, c)) = domain.cell_at(p[0], p[1], resolution) {
            for (acc, v) in grid.cell_mut(r, c).iter_mut().zip(f.row(i)) {
                *acc += v;
            }
        }
    }
    Ok(grid)
}

/// Copies each point's cell vector to the point, adding it to the point's
/// existing features when it has any. Out-of-domain points receive zeros.
pub fn unpool_grid_to_points(
    grid: &FeatureGrid,
    cloud: &PointCloud,
    domain: &FloorplanDomain,
) -> Result<Features, FeatureError> {
    let mut out = match cloud.features() {
        Some(f) if f.channels() != grid.channels => {
            return Err(FeatureError::ChannelMismatch {
                expected: grid.channels,
                got: f.channels(),
            })
        }
        Some(f) => f.clone(),
        None => Features::zeros(cloud.len(), grid.channels),
    };
    let res = grid.resolution as u32;
    for (i, p) in cloud.positions().iter().enumerate() {
        if let Some((r, c)) = domain.cell_at(p[0], p[1], res) {
            for (acc, v) in out.row_mut(i).iter_mut().zip(grid.cell(r, c)) {
                *acc += v;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// Row-major `width × height` image of `channels` values per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), width * height * channels, "image size mismatch");
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn pixel(&self, col: usize, row: usize) -> &[f32] {
        let i = (row * self.width + col) * self.channels;
        &self.data[i..i + self.channels]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CameraFrame {
    pub intrinsics: Intrinsics,
    /// World-from-camera, row-major.
    pub pose: [[f64; 4]; 4],
    /// Metres; 0 marks an invalid pixel. One channel.
    pub depth: Image,
    pub features: Image,
}

pub fn is_rigid(pose: &[[f64; 4]; 4]) -> bool {
    if pose.iter().flatten().any(|v| !v.is_finite()) {
        return false;
    }
    if pose[3] != [0.0, 0.0, 0.0, 1.0] {
        return false;
    }
    for i in 0..3 {
        for j in 0..3 {
            let d: f64 = (0..3).map(|k| pose[i][k] * pose[j][k]).sum();
            let e = if i == j { 1.0 } else { 0.0 };
            if (d - e).abs() > RIGID_TOLERANCE {
                return false;
            }
        }
    }
    let m = |i: usize, j: usize| pose[i][j];
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    (det - 1.0).abs() <= RIGID_TOLERANCE
}

/// Back-projects every valid depth pixel into world space, carrying the
/// pixel's feature vector. When the feature image has a different size it is
/// sampled nearest-neighbour.
pub fn unproject_frame(frame: &CameraFrame) -> Result<PointCloud, FeatureError> {
    if !is_rigid(&frame.pose) {
        return Err(FeatureError::NonRigidPose);
    }
    let k = frame.intrinsics;
    if !(k.fx > 0.0 && k.fy > 0.0) {
        return Err(FeatureError::BadIntrinsics);
    }
    let (dw, dh) = (frame.depth.width, frame.depth.height);
    let feat = &frame.features;
    let m = &frame.pose;
    let mut positions = Vec::new();
    let mut data = Vec::new();
    for v in 0..dh {
        for u in 0..dw {
            let d = frame.depth.data[v * dw + u] as f64;
            if d.is_nan() || d <= 0.0 || !d.is_finite() {
                continue;
            }
            let c = [
                (u as f64 - k.cx) * d / k.fx,
                (v as f64 - k.cy) * d / k.fy,
                d,
            ];
            let w: [f64; 3] =
                std::array::from_fn(|i| m[i][0] * c[0] + m[i][1] * c[1] + m[i][2] * c[2] + m[i][3]);
            positions.push(w);
            let fu = (u * feat.width / dw).min(feat.width.saturating_sub(1));
            let fv = (v * feat.height / dh).min(feat.height.saturating_sub(1));
            if feat.channels > 0 {
                data.extend(feat.pixel(fu, fv).iter().map(|&x| x as f64));
            }
        }
    }
    let features = Features::new(feat.channels, data)?;
    Ok(PointCloud::new(positions).with_features(features)?)
}

/// Pools the unprojected features of frames `0, stride, 2·stride, …` into
/// one grid at the domain's resolution.
pub fn pool_image_features(
    frames: &[CameraFrame],
    domain: &FloorplanDomain,
    stride: usize,
) -> Result<FeatureGrid, FeatureError> {
    if stride == 0 {
        return Err(FeatureError::ZeroStride);
    }
    let Some(first) = frames.first() else {
        return Ok(FeatureGrid::zeros(domain.resolution as usize, 0));
    };
    let channels = first.features.channels;
    let mut grid = FeatureGrid::zeros(domain.resolution as usize, channels);
    for frame in frames.iter().step_by(stride) {
        if frame.features.channels != channels {
            return Err(FeatureError::ChannelMismatch {
                expected: channels,
                got: frame.features.channels,
            });
        }
        let part = pool_points_to_grid(&unproject_frame(frame)?, domain, domain.resolution)?;
        for (a, b) in grid.data.iter_mut().zip(&part.data) {
            *a += b;
        }
    }
    Ok(grid)
}

fn read_u32(b: &[u8], at: usize) -> Result<u32, FeatureError> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes(s.try_into().unwrap()))
        .ok_or_else(|| FeatureError::Format("truncated header".into()))
}

fn read_f32s(b: &[u8], n: usize) -> Result<Vec<f32>, FeatureError> {
    if b.len() != n * 4 {
        return Err(FeatureError::Format(format!(
            "expected {} data bytes, found {}",
            n * 4,
            b.len()
        )));
    }
    Ok(b.chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn check_magic(b: &[u8], magic: &[u8; 4]) -> Result<(), FeatureError> {
    if b.get(..4) != Some(magic) {
        return Err(FeatureError::Format(format!(
            "bad magic, expected {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub fn decode_depth(b: &[u8]) -> Result<Image, FeatureError> {
    check_magic(b, b"FGD1")?;
    let w = read_u32(b, 4)? as usize;
    let h = read_u32(b, 8)? as usize;
    Ok(Image::new(w, h, 1, read_f32s(&b[12..], w * h)?))
}

pub fn encode_depth(img: &Image) -> Vec<u8> {
    let mut out = b"FGD1".to_vec();
    out.extend((img.width as u32).to_le_bytes());
    out.extend((img.height as u32).to_le_bytes());
    out.extend(img.data.iter().flat_map(|v| v.to_le_bytes()));
    out
}

pub fn decode_feature_image(b: &[u8]) -> Result<Image, FeatureError> {
    check_magic(b, b"FGF1")?;
    let w = read_u32(b, 4)? as usize;
    let h = read_u32(b, 8)? as usize;
    let c = read_u32(b, 12)? as usize;
    Ok(Image::new(w, h, c, read_f32s(&b[16..], w * h * c)?))
}

pub fn encode_feature_image(img: &Image) -> Vec<u8> {
    let mut out = b"FGF1".to_vec();
    for v in [img.width, img.height, img.channels] {
        out.extend((v as u32).to_le_bytes());
    }
    out.extend(img.data.iter().flat_map(|v| v.to_le_bytes()));
    out
}

fn parse_reals(text: &str, n: usize, what: &str) -> Result<Vec<f64>, FeatureError> {
    let v: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| FeatureError::Format(format!("{what}: {e}")))?;
    if v.len() != n {
        return Err(FeatureError::Format(format!(
            "{what}: expected {n} numbers, found {}",
            v.len()
        )));
    }
    Ok(v)
}

pub fn parse_pose(text: &str) -> Result<[[f64; 4]; 4], FeatureError> {
    let v = parse_reals(text, 16, "pose")?;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| v[i * 4 + j])))
}

pub fn parse_intrinsics(text: &str) -> Result<Intrinsics, FeatureError> {
    let v = parse_reals(text, 4, "intrinsics")?;
    Ok(Intrinsics {
        fx: v[0],
        fy: v[1],
        cx: v[2],
        cy: v[3],
    })
}

fn read(path: &Path) -> Result<Vec<u8>, FeatureError> {
    fs::read(path).map_err(|e| FeatureError::Format(format!("{}: {e}", path.display())))
}

/// Loads `intrinsics.txt` and every `NNNN.depth.raw` / `NNNN.pose.txt` /
/// `NNNN.feat.raw` triple in `dir`, ordered by frame number.
pub fn load_frames(dir: &Path) -> Result<Vec<CameraFrame>, FeatureError> {
    let text = |p: PathBuf| -> Result<String, FeatureError> {
        String::from_utf8(read(&p)?)
            .map_err(|_| FeatureError::Format(format!("{}: not UTF-8", p.display())))
    };
    let intrinsics = parse_intrinsics(&text(dir.join("intrinsics.txt"))?)?;
    let mut stems: Vec<String> = fs::read_dir(dir)
        .map_err(|e| FeatureError::Format(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.strip_suffix(".depth.raw"))
                .map(str::to_string)
        })
        .collect();
    stems.sort();
    stems
        .iter()
        .map(|s| {
            Ok(CameraFrame {
                intrinsics,
                pose: parse_pose(&text(dir.join(format!("{s}.pose.txt")))?)?,
                depth: decode_depth(&read(&dir.join(format!("{s}.depth.raw")))?)?,
                features: decode_feature_image(&read(&dir.join(format!("{s}.feat.raw")))?)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];

    fn unit_domain() -> FloorplanDomain {
        FloorplanDomain::new([0.0, 0.0], 1.0)
    }

    fn frame(depth: Vec<f32>, w: usize, h: usize) -> CameraFrame {
        let n = w * h;
        CameraFrame {
            intrinsics: Intrinsics {
                fx: 2.0,
                fy: 2.0,
                cx: 1.0,
                cy: 1.0,
            },
            pose: IDENTITY,
            depth: Image::new(w, h, 1, depth),
            features: Image::new(w, h, 2, (0..2 * n).map(|i| i as f32).collect()),
        }
    }

    #[test]
    fn two_points_sum_in_one_cell() {
        let cloud = PointCloud::new(vec![[10.2, 10.7, 0.0], [10.9, 10.1, 5.0]])
            .with_features(Features::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap())
            .unwrap();
        let g = pool_points_to_grid(&cloud, &unit_domain(), 256).unwrap();
        assert_eq!(g.cell(10, 10), &[4.0, 6.0]);
        assert_eq!(g.channel_total(0), 4.0);
    }

    #[test]
    fn unpool_assigns_then_adds() {
        let mut g = FeatureGrid::zeros(256, 1);
        g.cell_mut(10, 10)[0] = 7.0;
        let cloud = PointCloud::new(vec![[10.5, 10.5, 0.0], [-3.0, 0.0, 0.0]]);
        let f = unpool_grid_to_points(&g, &cloud, &unit_domain()).unwrap();
        assert_eq!(f.as_slice(), &[7.0, 0.0]);
        let with = cloud.with_features(f).unwrap();
        let f2 = unpool_grid_to_points(&g, &with, &unit_domain()).unwrap();
        assert_eq!(f2.as_slice(), &[14.0, 0.0]);
    }

    #[test]
    fn pool_without_features_fails() {
        let cloud = PointCloud::new(vec![[0.0; 3]]);
        assert_eq!(
            pool_points_to_grid(&cloud, &unit_domain(), 256),
            Err(FeatureError::MissingFeatures)
        );
    }

    #[test]
    fn principal_point_ray() {
        let mut depth = vec![0.0; 9];
        depth[4] = 2.0;
        let cloud = unproject_frame(&frame(depth, 3, 3)).unwrap();
        assert_eq!(cloud.positions(), &[[0.0, 0.0, 2.0]]);
        assert_eq!(cloud.features().unwrap().as_slice(), &[8.0, 9.0]);
    }

    #[test]
    fn zero_depth_gives_empty_cloud() {
        assert!(unproject_frame(&frame(vec![0.0; 9], 3, 3)).unwrap().is_empty());
    }

    #[test]
    fn rejects_reflection_and_scale() {
        let mut f = frame(vec![1.0; 9], 3, 3);
        f.pose[0][0] = -1.0;
        assert_eq!(unproject_frame(&f), Err(FeatureError::NonRigidPose));
        f.pose[0][0] = 2.0;
        assert_eq!(unproject_frame(&f), Err(FeatureError::NonRigidPose));
    }

    #[test]
    fn smaller_feature_image_sampled_nearest() {
        let mut f = frame(vec![1.0; 16], 4, 4);
        f.features = Image::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let c = unproject_frame(&f).unwrap();
        let vals = c.features().unwrap().as_slice();
        assert_eq!(vals[0], 1.0);
        assert_eq!(vals[3], 2.0);
        assert_eq!(vals[15], 4.0);
    }

    #[test]
    fn stride_selects_every_tenth_frame() {
        let domain = FloorplanDomain::new([-2.0, -2.0], 4.0 / 256.0);
        let frames: Vec<CameraFrame> = (0..25)
            .map(|i| {
                let mut f = frame(vec![1.0; 9], 3, 3);
                f.features = Image::new(3, 3, 1, vec![i as f32; 9]);
                f
            })
            .collect();
        let g = pool_image_features(&frames, &domain, DEFAULT_FRAME_STRIDE).unwrap();
        assert_eq!(g.channel_total(0), 9.0 * (0.0 + 10.0 + 20.0));
    }

    #[test]
    fn file_formats_round_trip() {
        let img = Image::new(3, 2, 1, vec![0.5, 1.0, 0.0, 2.0, 3.0, 4.0]);
        assert_eq!(decode_depth(&encode_depth(&img)).unwrap(), img);
        let feat = Image::new(1, 2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(decode_feature_image(&encode_feature_image(&feat)).unwrap(), feat);
        assert!(decode_depth(b"FGF1").is_err());
        let pose = parse_pose("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n").unwrap();
        assert_eq!(pose, IDENTITY);
        assert!(parse_intrinsics("1 2 3").is_err());
    }
}
