use super::{extract_peaks, IconCandidate, CONFIDENCE_OFFSET};
use crate::geometry::{Point, Rect};
use crate::heatmap::{icon_channel, icon_corner_channel, HeatmapStack, ICON_BACKGROUND};
use crate::model::{IconKind, AXIS_TOLERANCE};

const MAX_BACKGROUND: f64 = 0.5;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= AXIS_TOLERANCE
}

/// Mean of each icon-semantic channel over the pixels inside `rect`; index 0
/// is background.
fn interior_means(stack: &HeatmapStack, rect: &Rect) -> Option<[f64; 10]> {
    let max = stack.resolution() as f64 - 1.0;
    let (r0, r1) = (rect.ymin.ceil().max(0.0), rect.ymax.floor().min(max));
    let (c0, c1) = (rect.xmin.ceil().max(0.0), rect.xmax.floor().min(max));
    if r0 > r1 || c0 > c1 {
        return None;
    }
    let mut sums = [0.0; 10];
    let mut n = 0usize;
    for r in r0 as usize..=r1 as usize {
        for c in c0 as usize..=c1 as usize {
            for (g, s) in sums.iter_mut().enumerate() {
                *s += stack.get(ICON_BACKGROUND + g, r, c) as f64;
            }
            n += 1;
        }
    }
    Some(sums.map(|s| s / n as f64))
}

/// Rectangles from TL/TR/BR/BL peak quadruples whose shared coordinates agree
/// within the axis tolerance and whose interior is mostly foreground.
pub fn gen_icon_candidates(stack: &HeatmapStack) -> Vec<IconCandidate> {
    let res = stack.resolution();
    let [tl, tr, br, bl]: [Vec<Point>; 4] = std::array::from_fn(|i| {
        extract_peaks(stack.plane(icon_corner_channel(i)), res)
            .iter()
            .map(|c| c.peak_point())
            .collect()
    });
    let mut out = Vec::new();
    for &a in &tl {
        for &b in tr.iter().filter(|b| b.x > a.x && near(a.y, b.y)) {
            for &d in bl.iter().filter(|d| d.y > a.y && near(a.x, d.x)) {
                for &c in br.iter().filter(|c| near(c.x, b.x) && near(c.y, d.y)) {
                    let rect = Rect::new(
                        0.5 * (a.x + d.x),
                        0.5 * (a.y + b.y),
                        0.5 * (b.x + c.x),
                        0.5 * (d.y + c.y),
                    );
                    if rect.area() <= 0.0 {
                        continue;
                    }
                    let Some(means) = interior_means(stack, &rect) else {
                        continue;
                    };
                    if means[0] > MAX_BACKGROUND {
                        continue;
                    }
                    let (kind, confidence) = IconKind::ALL
                        .iter()
                        .map(|&k| (k, means[icon_channel(k) - ICON_BACKGROUND]))
                        .fold((IconKind::ALL[0], f64::NEG_INFINITY), |best, x| {
                            if x.1 > best.1 {
                                x
                            } else {
                                best
                            }
                        });
                    out.push(IconCandidate {
                        rect,
                        kind,
                        confidence,
                        weight: confidence - CONFIDENCE_OFFSET,
                    });
                }
            }
        }
    }
    out.sort_by(|p, q| {
        let k = |i: &IconCandidate| [i.rect.ymin, i.rect.xmin, i.rect.ymax, i.rect.xmax];
        k(p).iter()
            .zip(k(q).iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.kind.cmp(&q.kind))
    });
    out
}
