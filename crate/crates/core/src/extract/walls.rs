use super::{CornerCandidate, ExtractError, WallCandidate, CONFIDENCE_OFFSET};
use crate::geometry::Point;
use crate::heatmap::{HeatmapStack, WALL};
use crate::model::Direction;
use crate::raster::strip_pixels;

pub const WALL_STRIP_WIDTH: usize = 7;
pub const OPENING_STRIP_WIDTH: usize = 5;

/// Mean of the wall semantic channel over the segment's strip of `width`
/// pixels, clipped to the image.
pub fn score_line(
    stack: &HeatmapStack,
    a: Point,
    b: Point,
    width: usize,
) -> Result<f64, ExtractError> {
    if width.is_multiple_of(2) {
        return Err(ExtractError::EvenWidth(width));
    }
    if a == b {
        return Err(ExtractError::ZeroLength);
    }
    let res = stack.resolution();
    let plane = stack.plane(WALL);
    let px = strip_pixels(a, b, width, res);
    if px.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = px.iter().map(|&(r, c)| plane[r * res + c] as f64).sum();
    Ok(sum / px.len() as f64)
}

fn overlap((a0, a1): (usize, usize), (b0, b1): (usize, usize)) -> bool {
    a0 <= b1 && b0 <= a1
}

/// Joins corner pairs whose components share rows (horizontal wall) or
/// columns (vertical wall) and whose junctions both open toward each other.
pub fn gen_wall_candidates(
    stack: &HeatmapStack,
    corners: &[CornerCandidate],
) -> Result<Vec<WallCandidate>, ExtractError> {
    let mut out = Vec::new();
    for i in 0..corners.len() {
        for j in i + 1..corners.len() {
            let (ci, cj) = (&corners[i], &corners[j]);
            let rows = overlap(ci.component.row_range(), cj.component.row_range());
            let cols = overlap(ci.component.col_range(), cj.component.col_range());
            let (p, q) = (ci.position, cj.position);
            let (dx, dy) = ((q.x - p.x).abs(), (q.y - p.y).abs());
            let horizontal = match (rows, cols) {
                (false, false) => continue,
                (true, false) => true,
                (false, true) => false,
                (true, true) => dx >= dy,
            };
            let segment = if horizontal {
                let y = 0.5 * (p.y + q.y);
                (Point::new(p.x, y), Point::new(q.x, y))
            } else {
                let x = 0.5 * (p.x + q.x);
                (Point::new(x, p.y), Point::new(x, q.y))
            };
            let (s, t) = segment;
            let toward = if horizontal {
                Direction::of_vector(t.x - s.x, 0.0)
            } else {
                Direction::of_vector(0.0, t.y - s.y)
            };
            let Some(d) = toward else { continue };
            if !ci.junction.admits(d) || !cj.junction.admits(d.opposite()) {
                continue;
            }
            let confidence = score_line(stack, s, t, WALL_STRIP_WIDTH)?;
            out.push(WallCandidate {
                a: i,
                b: j,
                horizontal,
                segment,
                confidence,
                weight: confidence - CONFIDENCE_OFFSET,
            });
        }
    }
    Ok(out)
}
