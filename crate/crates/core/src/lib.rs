//! Vector floorplan reconstruction from point clouds and floorplan heatmaps.
//!
//! The pipeline runs point cloud → top-down domain and density image →
//! heatmap stack → primitive candidates → 0-1 integer program → vector
//! [`model::Floorplan`], and [`evaluate`] scores the result against ground
//! truth.

pub mod evaluate;
pub mod extract;
pub mod features;
pub mod geometry;
pub mod heatmap;
pub mod model;
pub mod pointcloud;
pub mod raster;
pub mod reconstruct;
pub mod synth;
