use super::walls::{score_line, OPENING_STRIP_WIDTH};
use super::{extract_peaks, ExtractError, OpeningCandidate, WallCandidate, CONFIDENCE_OFFSET};
use crate::geometry::{segment_distance, Point};
use crate::heatmap::{opening_channel, HeatmapStack};
use crate::model::{Direction, AXIS_TOLERANCE};

fn peaks(stack: &HeatmapStack, d: Direction) -> Vec<Point> {
    extract_peaks(stack.plane(opening_channel(d)), stack.resolution())
        .iter()
        .map(|c| c.peak_point())
        .collect()
}

fn hosts(walls: &[WallCandidate], horizontal: bool, p: Point, q: Point) -> Vec<usize> {
    walls
        .iter()
        .enumerate()
        .filter(|(_, w)| {
            w.horizontal == horizontal
                && segment_distance(p, w.segment.0, w.segment.1) <= AXIS_TOLERANCE
                && segment_distance(q, w.segment.0, w.segment.1) <= AXIS_TOLERANCE
        })
        .map(|(i, _)| i)
        .collect()
}

/// Pairs facing end-point peaks (+X with -X, +Y with -Y) that share a host
/// wall candidate, nearest pairs first, each peak used at most once.
pub fn gen_opening_candidates(
    stack: &HeatmapStack,
    walls: &[WallCandidate],
) -> Result<Vec<OpeningCandidate>, ExtractError> {
    let mut out = Vec::new();
    for (start, horizontal) in [(Direction::PosX, true), (Direction::PosY, false)] {
        let firsts = peaks(stack, start);
        let seconds = peaks(stack, start.opposite());
        let mut pairs = Vec::new();
        for (i, &p) in firsts.iter().enumerate() {
            for (j, &q) in seconds.iter().enumerate() {
                let ahead = if horizontal { q.x > p.x } else { q.y > p.y };
                if !ahead {
                    continue;
                }
                let h = hosts(walls, horizontal, p, q);
                if !h.is_empty() {
                    pairs.push((p.distance(q), i, j, h));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut used_first = vec![false; firsts.len()];
        let mut used_second = vec![false; seconds.len()];
        for (_, i, j, h) in pairs {
            if used_first[i] || used_second[j] {
                continue;
            }
            used_first[i] = true;
            used_second[j] = true;
            let (p, q) = (firsts[i], seconds[j]);
            let endpoints = if horizontal {
                let y = 0.5 * (p.y + q.y);
                [Point::new(p.x, y), Point::new(q.x, y)]
            } else {
                let x = 0.5 * (p.x + q.x);
                [Point::new(x, p.y), Point::new(x, q.y)]
            };
            let confidence = score_line(stack, endpoints[0], endpoints[1], OPENING_STRIP_WIDTH)?;
            out.push(OpeningCandidate {
                endpoints,
                hosts: h,
                confidence,
                weight: confidence - CONFIDENCE_OFFSET,
            });
        }
    }
    out.sort_by(|a, b| {
        let k = |o: &OpeningCandidate| (o.endpoints[0].y, o.endpoints[0].x);
        let (ka, kb) = (k(a), k(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(out)
}
