use std::collections::VecDeque;

use serde::Serialize;

use crate::geometry::Point;

pub const PEAK_THRESHOLD: f32 = 0.5;
/// Components must have strictly more pixels than this.
pub const MIN_AREA: usize = 5;

/// A 4-connected above-threshold region and its highest pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub pixels: Vec<(usize, usize)>,
    pub peak: (usize, usize),
    pub peak_value: f32,
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn row_range(&self) -> (usize, usize) {
        let rows = self.pixels.iter().map(|p| p.0);
        (rows.clone().min().unwrap(), rows.max().unwrap())
    }

    pub fn col_range(&self) -> (usize, usize) {
        let cols = self.pixels.iter().map(|p| p.1);
        (cols.clone().min().unwrap(), cols.max().unwrap())
    }

    pub fn peak_point(&self) -> Point {
        Point::new(self.peak.1 as f64, self.peak.0 as f64)
    }

    pub fn summary(&self) -> ComponentSummary {
        let (r0, r1) = self.row_range();
        let (c0, c1) = self.col_range();
        ComponentSummary {
            area: self.area(),
            rows: [r0, r1],
            cols: [c0, c1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub area: usize,
    pub rows: [usize; 2],
    pub cols: [usize; 2],
}

/// Highest pixel of a component. Among equal maxima the pixel closest to the
/// centroid of the tied pixels wins, then the smallest (row, col).
fn pick_peak(plane: &[f32], res: usize, pixels: &[(usize, usize)]) -> ((usize, usize), f32) {
    let best = pixels
        .iter()
        .map(|&(r, c)| plane[r * res + c])
        .fold(f32::NEG_INFINITY, f32::max);
    let tied: Vec<(usize, usize)> = pixels
        .iter()
        .copied()
        .filter(|&(r, c)| plane[r * res + c] == best)
        .collect();
    let n = tied.len() as f64;
    let cr = tied.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let cc = tied.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let d = |&(r, c): &(usize, usize)| (r as f64 - cr).powi(2) + (c as f64 - cc).powi(2);
    let peak = *tied
        .iter()
        .min_by(|a, b| d(a).total_cmp(&d(b)).then(a.cmp(b)))
        .unwrap();
    (peak, best)
}

/// All 4-connected components of pixels `>= threshold`, in raster order of
/// their first pixel.
pub fn connected_components(plane: &[f32], res: usize, threshold: f32) -> Vec<Component> {
    let mut seen = vec![false; plane.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..plane.len() {
        if seen[start] || plane[start].partial_cmp(&threshold).is_none_or(|o| o.is_lt()) {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / res, i % res);
            pixels.push((r, c));
            let mut visit = |j: usize| {
                if !seen[j] && plane[j] >= threshold {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - res);
            }
            if r + 1 < res {
                visit(i + res);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < res {
                visit(i + 1);
            }
        }
        pixels.sort_unstable();
        let (peak, peak_value) = pick_peak(plane, res, &pixels);
        out.push(Component {
            pixels,
            peak,
            peak_value,
        });
    }
    out
}

/// Components above 0.5 with more than 5 pixels.
pub fn extract_peaks(plane: &[f32], res: usize) -> Vec<Component> {
    connected_components(plane, res, PEAK_THRESHOLD)
        .into_iter()
        .filter(|c| c.area() > MIN_AREA)
        .collect()
}
